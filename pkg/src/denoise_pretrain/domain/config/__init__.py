""" denoise_pretrain.domain.config

"""

from __future__ import annotations

from .schema import Config
