"""Unprop処理用のカスタム例外クラス"""


class UnpropError(Exception):
    """Unprop処理の基底例外"""
    pass


class InvalidOffsetError(UnpropError):
    """分割位置が幅0の子矩形を生むエラー"""
    pass


class InfeasiblePartitionError(UnpropError):
    """目標の矩形数まで分割できないエラー"""
    pass


class PartitionValidationError(UnpropError):
    """矩形集合が画像を正確にタイル張りしていないエラー"""
    pass


class NotAppliedError(UnpropError):
    """拡張が適用されていないレコードに対する操作のエラー"""
    pass


class ImageIOError(UnpropError):
    """画像ファイルの読み書きエラー"""
    pass


class ImageFormatError(UnpropError):
    """画像フォーマットの基底例外"""
    pass


class UnsupportedFormatError(ImageFormatError):
    """16bit・パレット・アルファ付きなど未対応のフォーマット"""
    pass


class MalformedImageError(ImageFormatError):
    """ヘッダ破損やデータ不足"""
    pass


class ManifestError(UnpropError):
    """マニフェストの読み込み・再生エラー"""
    pass
