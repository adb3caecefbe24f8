"""Segmentation adapter: pretrained model in, ELSSR-1 label raster out.

The adapter is replaceable by any producer of ELSSR-1 files; the
assessment pipeline consumes only the exported raster + sidecar pair.
"""

from .adapter import AdapterConfig, ExportError, InferenceError, ModelLoadError, segment_and_export

__version__ = "0.1.0"
