"""facelight: screen-to-face illumination simulation and content inference.

The package models how on-screen content lights up a human face, renders
synthetic face images, analyzes blue/red reflection asymmetries, and runs a
two-tier classifier with temporal label correction to recover which
application was on the screen.
"""

from .errors import DomainError, GeometryError
from .labels import UNKNOWN, LabelLayout, accuracy, one_hot, split_label, unify_label
from .optics import (
    EmitterUnit,
    FacePoint,
    OpticsConfig,
    angular_distribution,
    diffuse_weight,
    incident_intensity,
    mirror_direction,
    reflected_intensity,
    reflected_intensity_planar,
    specular_weight,
)
from .scene import (
    FaceModel,
    Scene,
    ScreenModel,
    WeightCurve,
    build_face,
    render_face,
    screen_from_image,
    simulate_weight_curves,
)
from .analysis import (
    KsResult,
    MdcResult,
    RatioMask,
    blue_red_ratio_mask,
    ks_pvalue,
    ks_statistic,
    ks_test,
    mdc_search,
)
from .preprocess import load_tensor, preprocess, resize, save_tensor, upscale2x, znorm
from .features import FeatureParams, cbam_forward, extract_features, pooled_features, resblock_forward
from .classifier import (
    MlpHead,
    TwoTierModel,
    adam_step,
    cross_entropy,
    load_model,
    predict,
    save_model,
    softmax,
    train_two_tier,
)
from .hlc import HlcParams, LabelSequence, correct_labels, end_of_step, start_of_step, sweep_params

__version__ = "0.1.0"
