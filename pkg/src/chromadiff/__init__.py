"""Perceptual color-difference toolkit.

Color model conversions (sRGB, linear RGB, XYZ, CIELAB, CIELUV, HSV, HSL),
the delta-E formula family behind a metric registry, k-means dominant-palette
extraction, and an evaluation harness with a survey service for collecting
human judgments.
"""

__version__ = "0.1.0"

from .colors import (
    D65,
    Color,
    ColorSpace,
    Hsl,
    Hsv,
    Lab,
    LinearRgb,
    Luv,
    Srgb8,
    WhitePoint,
    Xyz,
    convert,
    convert_array,
    format_hex,
    parse_color,
)
from .metrics import (
    Ciede2000Params,
    CmcParams,
    MetricDescriptor,
    TABLE_METRICS,
    available_metrics,
    cylindrical_distance,
    delta_cmc,
    delta_e76,
    delta_e94,
    delta_e2000,
    delta_e_luv,
    euclidean_rgb,
    evaluate,
    registry_lookup,
    weighted_rgb,
)
from .palette import (
    KmeansConfig,
    PaletteKMeans,
    PaletteResult,
    PixelMatrix,
    extract_palette,
    kmeans,
    load_image,
)
from .evaluation import (
    ColorPair,
    ColorPairDataset,
    DistanceTable,
    EvaluationReport,
    aggregate_judgments,
    build_report,
    compute_distance_table,
    load_dataset,
    load_reference_table,
    mae_normalized,
    pearson,
    render_heatmap,
    spearman,
)

__all__ = [name for name in dir() if not name.startswith("_")]
