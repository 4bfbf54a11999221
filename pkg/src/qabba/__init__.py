"""Quantized symbolic time-series approximation.

A series is compressed into a polygonal chain of (length, increment) pieces,
the pieces are clustered into a small codebook of symbolic centers, and the
codebook is quantized to low bit-width integers::

    >>> import numpy as np, qabba
    >>> art = qabba.symbolize(np.sin(np.linspace(0, 6, 200)), qabba.PipelineConfig())
    >>> rec = qabba.reconstruct(art)
"""
from ._backend import BACKEND
from .compression import Segment, check_piece_criterion, compress, inverse_compress
from .core import (
    CompressionParams, DigitizationParams, EmptySeries, Method, NonFiniteSample, Norm, Piece,
    PipelineConfig, QabbaError, QuantMode, QuantSpec, Series, validate_series,
)
from .digitization import Codebook, digitize, render
from .metrics import MetricReport, dtw, mse
from .pipeline import SymbolicArtifact, reconstruct, symbolize, symbolize_multichannel
from .quantization import QuantParams, make_params, quantize_codebook
from .storage import decode, encode

__version__ = "0.1.0"
