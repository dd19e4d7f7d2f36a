"""Active Learning Method with classic ink-drop planes, Fast IDS describing
vectors, and a behavioural memristor-crossbar backend."""
from .core import (ConfigError, Domain, FastIdsError, InputError, KernelShape, Resolution,
                   Sample, dequantize, quantize, quantize_array)
from .engine import (AlmConfig, AlmModel, classify, classify_many, fit, load_model,
                     predict, predict_many, save_model)

__version__ = "0.1.0"

__all__ = [
    "AlmConfig", "AlmModel", "ConfigError", "Domain", "FastIdsError", "InputError",
    "KernelShape", "Resolution", "Sample", "classify", "classify_many", "dequantize", "fit",
    "load_model", "predict", "predict_many", "quantize", "quantize_array", "save_model",
]
