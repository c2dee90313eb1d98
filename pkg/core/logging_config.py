import logging
from pathlib import Path

from core import config


def _setup_logging() -> logging.Logger:
    logger = logging.getLogger("unprop")
    if logger.handlers:
        return logger

    level = logging.DEBUG if config.DEBUG_MODE else logging.INFO
    logger.setLevel(level)

    fmt = logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s")

    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(level)
    stream_handler.setFormatter(fmt)

    logger.addHandler(stream_handler)

    # ファイルログは任意（権限/実行環境によっては作れないため、失敗しても致命にしない）
    if config.LOG_TO_FILE:
        try:
            log_dir = Path(config.LOG_DIR)
            log_dir.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_dir / "unprop.log", encoding="utf-8")
            file_handler.setLevel(level)
            file_handler.setFormatter(fmt)
            logger.addHandler(file_handler)
        except Exception:
            # StreamHandlerのみで継続
            pass

    logger.propagate = False
    return logger


def set_verbose(verbose: bool) -> None:
    """CLI の -v で DEBUG に切り替える。"""
    level = logging.DEBUG if verbose or config.DEBUG_MODE else logging.INFO
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)


logger = _setup_logging()
