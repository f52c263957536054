from .layers import (
    ACTIVATION_KINDS,
    Activation,
    BatchNorm1d,
    Conv1d,
    Dense,
    ExpandChannel,
    Flatten,
    Layer,
    MaxPool1d,
    Parameter,
)
from .losses import binary_cross_entropy, softmax_cross_entropy
from .models import (
    BIG_WIDTHS,
    MODEL_KINDS,
    Model,
    ModelOptions,
    ParamCount,
    build_model,
    count_parameters,
    layer_param_counts,
    summary,
)

__all__ = [
    "ACTIVATION_KINDS",
    "Activation",
    "BatchNorm1d",
    "BIG_WIDTHS",
    "Conv1d",
    "Dense",
    "ExpandChannel",
    "Flatten",
    "Layer",
    "MaxPool1d",
    "MODEL_KINDS",
    "Model",
    "ModelOptions",
    "ParamCount",
    "Parameter",
    "binary_cross_entropy",
    "build_model",
    "count_parameters",
    "layer_param_counts",
    "softmax_cross_entropy",
    "summary",
]
