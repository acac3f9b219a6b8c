""" denoise_pretrain.domain.config.defaults

    PURPOSE:
        - central location for configuration defaults and named recipes

    BEHAVIOURS:
        - DEF_CON is the desk-scale baseline; every valid key appears here,
          so the key set doubles as the schema
        - RECIPES hold the published hyperparameter tables as partial
          overrides applied between the defaults and a config file

    PUBLIC:
        - DEF_CON
        - RECIPES
        - SECTIONS
"""

from __future__ import annotations

from typing import Any, Dict

SECTIONS = ("run", "data", "optimizer", "batching", "model", "denoising")

DEF_CON: Dict[str, Any] = {
    "run": {
        "seed": 0,
        "mode": "pretrain",
        "dtype": "float64",
        "threads": 1,
        "log_every": 10,
        "eval_every": 50,
        "checkpoint_every": 0,
        "early_stopping_patience": 10,
    },
    "data": {
        "upstream_path": None,
        "downstream_path": None,
        "synthetic_upstream_size": 200,
        "synthetic_downstream_size": 100,
        "synthetic_elements": ["H", "C", "N", "O", "F"],
        "include_initial": False,
        "target_label": "surrogate_energy",
        "train_fraction": 0.8,
        "valid_fraction": 0.1,
        "test_fraction": 0.1,
        "upstream_fraction": 1.0,
    },
    "optimizer": {
        "gradient_steps": 200,
        "beta1": 0.9,
        "beta2": 0.95,
        "adam_epsilon": 1e-8,
        "warm_up_steps": 20,
        "warm_up_start_learning_rate": 1e-5,
        "warm_up_max_learning_rate": 1e-3,
        "cosine_min_learning_rate": 1e-5,
        "cosine_cycle_length": 200,
        "ema_decay": 0.99,
    },
    "batching": {
        "max_vertices_in_batch": 256,
        "max_edges_in_batch": 9216,
        "max_graphs_in_batch": 8,
        "max_edges_per_vertex": 20,
    },
    "model": {
        "variant": "gns",
        "message_passing_layers": 3,
        "block_iterations": 1,
        "vertex_edge_latent_vector_sizes": 32,
        "mlp_hidden_sizes": 64,
        "mlp_number_of_layers": 2,
        "activation": "shifted_softplus",
        "decoder_aggregation": "sum",
        "decoder_mlp_number_of_layers": 2,
        "tat_eta": 0.8,
        "shortcut_weight": 0.9,
        "noise_readout": "directional",
        "distance_featurization": "bessel",
        "distance_basis_size": 8,
        "connectivity_radius": 4.0,
        "featurization_r_min": 0.0,
        "featurization_sigma": 1.0,
        "featurization_mu": 0.0,
    },
    "denoising": {
        "position_noise_sigma": 0.02,
        "mean_center_noise": True,
        "denoise_target": "noise",
        "position_loss_coefficient": 1.0,
        "target_loss_coefficient": 1.0,
        "atom_type_loss_coefficient": 4.0,
        "atom_type_mask_probability": 0.75,
    },
}

_TABLE_MODEL: Dict[str, Any] = {
    "variant": "gns_tat",
    "message_passing_layers": 10,
    "block_iterations": 3,
    "vertex_edge_latent_vector_sizes": 512,
    "mlp_hidden_sizes": 1024,
    "mlp_number_of_layers": 3,
    "activation": "tailored_lrelu",
    "decoder_aggregation": "mean",
    "distance_featurization": "bessel",
    "featurization_r_min": 0.0,
    "featurization_sigma": 1.0,
}

RECIPES: Dict[str, Dict[str, Any]] = {
    "pcqm4mv2_pretrain": {
        "run": {"mode": "pretrain"},
        "optimizer": {
            "gradient_steps": 300_000,
            "warm_up_steps": 10_000,
            "warm_up_start_learning_rate": 1e-5,
            "warm_up_max_learning_rate": 1e-4,
            "cosine_min_learning_rate": 1e-7,
            "cosine_cycle_length": 500_000,
            "ema_decay": 0.9999,
        },
        "batching": {
            "max_vertices_in_batch": 256,
            "max_edges_in_batch": 9216,
            "max_graphs_in_batch": 8,
            "max_edges_per_vertex": 20,
        },
        "model": dict(_TABLE_MODEL),
        "denoising": {
            "position_noise_sigma": 0.02,
            "position_loss_coefficient": 1.0,
            "atom_type_mask_probability": 0.75,
            "atom_type_loss_coefficient": 4.0,
        },
    },
    "qm9_finetune": {
        "run": {"mode": "finetune"},
        "optimizer": {
            "gradient_steps": 1_000_000,
            "warm_up_steps": 10_000,
            "warm_up_start_learning_rate": 1e-5,
            "warm_up_max_learning_rate": 1e-4,
            "cosine_min_learning_rate": 3e-7,
            "cosine_cycle_length": 1_000_000,
            "ema_decay": 0.9999,
        },
        "batching": {
            "max_vertices_in_batch": 256,
            "max_edges_in_batch": 3072,
            "max_graphs_in_batch": 8,
            "max_edges_per_vertex": 20,
        },
        "model": dict(_TABLE_MODEL),
        "denoising": {
            "position_noise_sigma": 0.05,
            "position_loss_coefficient": 0.01,
            "atom_type_mask_probability": 0.0,
            "atom_type_loss_coefficient": 0.0,
        },
    },
    "oc20_gns": {
        "optimizer": {
            "gradient_steps": 500_000,
            "warm_up_steps": 500_000,
            "warm_up_start_learning_rate": 1e-5,
            "warm_up_max_learning_rate": 1e-4,
            "cosine_min_learning_rate": 5e-6,
            "cosine_cycle_length": 5_000_000,
            "ema_decay": 0.9999,
        },
        "batching": {
            "max_vertices_in_batch": 1024,
            "max_edges_in_batch": 12800,
            "max_graphs_in_batch": 10,
            "max_edges_per_vertex": 20,
        },
        "model": {
            "variant": "gns",
            "message_passing_layers": 5,
            "block_iterations": 5,
            "vertex_edge_latent_vector_sizes": 512,
            "mlp_hidden_sizes": 1024,
            "mlp_number_of_layers": 3,
            "activation": "shifted_softplus",
            "decoder_aggregation": "sum",
            "distance_featurization": "gaussian",
            "featurization_mu": 0.0,
            "featurization_sigma": 0.5,
        },
        "denoising": {
            "position_noise_sigma": 0.2,
            "position_loss_coefficient": 1.0,
            "atom_type_mask_probability": 0.0,
            "atom_type_loss_coefficient": 0.0,
        },
    },
    "synthetic": {},
}
