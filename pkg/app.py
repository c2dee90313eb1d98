import streamlit as st

from core import config
from core.augment import shuffle_grid_cells, unprop
from core.exceptions import ImageFormatError, InfeasiblePartitionError
from core.imgio import ImageFileFormat, decode_image, encode_image
from core.logging_config import logger
from core.rng import hash64, make_rng
from core.schemas import UnpropParams
from core.viz import draw_border_overlay

st.set_page_config(layout="wide")
st.title("Unproportional Mosaicing Preview")

# --- サイドバー: パラメータ ---
st.sidebar.header("⚙️ パラメータ")
preset = st.sidebar.selectbox("プリセット", ["(なし)", *sorted(config.PRESETS)])
base = UnpropParams.from_preset(preset) if preset in config.PRESETS else UnpropParams()

mode = st.sidebar.radio("モード", ["unprop", "grid"], horizontal=True)
seed = st.sidebar.number_input("シード", min_value=0, max_value=2**31 - 1, value=int(base.seed), step=1)
index = st.sidebar.number_input("画像インデックス", min_value=0, value=0, step=1)

if mode == "unprop":
    target_rects = st.sidebar.slider("矩形数 N", 2, 16, int(base.target_rects))
    aspect_ratio = st.sidebar.slider("アスペクト比 G", 0.1, 4.0, float(base.aspect_ratio), step=0.01)
    refine_steps = st.sidebar.slider("リファイン回数 J", 0, 16, int(base.refine_steps))
else:
    rows = st.sidebar.slider("行数", 1, 8, 3)
    cols = st.sidebar.slider("列数", 1, 8, 3)
show_borders = st.sidebar.checkbox("矩形の枠線を表示", value=True)

uploaded = st.file_uploader("画像をアップロード（PNG / PPM / PGM）", type=["png", "ppm", "pgm"])
if uploaded is None:
    st.info("画像をアップロードすると、拡張結果をプレビューできます。")
    st.stop()

try:
    img = decode_image(uploaded.getvalue())
except ImageFormatError as e:
    st.error(f"画像を読み込めませんでした: {e}")
    st.stop()

# プレビューでは常に適用する（P=1）
rng = make_rng(hash64(int(seed), int(index)))
try:
    if mode == "unprop":
        params = UnpropParams(
            aspect_ratio=aspect_ratio,
            target_rects=target_rects,
            refine_steps=refine_steps,
            apply_prob=1.0,
            seed=int(seed),
        )
        augmented, record = unprop(img, params, rng)
        partition, permutation = record.partition, record.permutation
    else:
        augmented, partition, permutation = shuffle_grid_cells(img, rows, cols, rng)
except (InfeasiblePartitionError, ValueError) as e:
    st.error(str(e))
    st.stop()

logger.debug("preview: %d rects, permutation=%s", len(partition), permutation.mapping)
shown = draw_border_overlay(augmented, partition) if show_borders else augmented

col_src, col_dst = st.columns(2)
with col_src:
    st.subheader("元画像")
    st.image(img.pixels if img.channels == 3 else img.pixels[:, :, 0], use_container_width=True)
with col_dst:
    st.subheader(f"拡張後（{len(partition)} 矩形）")
    st.image(shown.pixels if shown.channels == 3 else shown.pixels[:, :, 0], use_container_width=True)

st.download_button(
    "拡張後の画像をダウンロード（PNG）",
    data=encode_image(augmented, ImageFileFormat.PNG),
    file_name="augmented.png",
    mime="image/png",
)

with st.expander("分割と置換"):
    st.json(
        {
            "rects": [r.as_tuple() for r in partition.rects],
            "permutation": permutation.mapping,
        }
    )
