""" package marker

    PURPOSE:
        - shared terminal face for status lines

"""

from __future__ import annotations

from denoise_pretrain.interface.interface import Interface

face = Interface()
