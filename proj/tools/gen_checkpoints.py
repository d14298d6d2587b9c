#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes three small per-epoch LoRA checkpoints with the safetensors package,
plus expected.json holding their float64 mean for cross-checking the reader
and the fusion kernel."""

import argparse
import json
import pathlib

import numpy as np
from safetensors.numpy import save_file

TENSORS = {
    "base_model.model.layers.0.self_attn.q_proj.lora_A.weight": (4, 16),
    "base_model.model.layers.0.self_attn.q_proj.lora_B.weight": (16, 4),
    "base_model.model.layers.0.self_attn.v_proj.lora_A.weight": (4, 16),
    "base_model.model.layers.0.self_attn.v_proj.lora_B.weight": (16, 4),
}
METADATA = {"rank": "4", "alpha": "8", "target_modules": '["q_proj", "v_proj"]', "format": "pt"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, required=True)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(2025)
    epochs = []
    for epoch in range(1, 4):
        tensors = {k: rng.uniform(-1, 1, size=s).astype(np.float32) for k, s in TENSORS.items()}
        save_file(tensors, str(args.out / f"epoch{epoch}.safetensors"), metadata=METADATA)
        epochs.append(tensors)

    expected = {k: [float(x) for x in np.mean([e[k].astype(np.float64) for e in epochs], axis=0).ravel()]
                for k in TENSORS}
    (args.out / "expected.json").write_text(json.dumps(expected) + "\n")


if __name__ == "__main__":
    main()
