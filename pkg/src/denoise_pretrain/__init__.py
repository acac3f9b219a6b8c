""" denoise_pretrain

    PURPOSE:
        - pre-training via denoising for 3D molecular property prediction

    BEHAVIOR:
        - structure ingestion, GNS / GNS-TAT graph networks, denoising and
          noisy-nodes objectives, score-matching checks, pretrain -> finetune runs

    PUBLIC:
        - __version__
"""

__version__ = "0.1.0"
