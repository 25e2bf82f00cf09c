#!/usr/bin/env python3
"""Regenerates the bundled MNIST fixture in data/.

Trains a 768:256:256:256:10 sign-activation BNN with per-neuron biases on
4000 of the 5000 MNIST digits shipped inside the mlxtend wheel
(mlxtend/data/data/mnist_5k.csv.gz), then exports

  mnist_bnn.json   BNN interchange file (kind "bnn")
  mnist_test.bin   the 1000 held-out digits as binarized spike vectors

The recorded bnn_accuracy is measured on the exported integer model with
the same decision rules the simulator uses, so it is the exact accuracy the
simulator must reproduce.

Usage: make_mnist_fixture.py --source mnist_5k.csv.gz|mlxtend.whl --out data/
"""

import argparse
import gzip
import io
import json
import struct
import zipfile
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

TOPOLOGY = [768, 256, 256, 256, 10]
SIDE = 28
CROP = 2


def kept_pixel_indices():
    edge = lambda x: x < CROP or x >= SIDE - CROP
    return np.array([r * SIDE + c for r in range(SIDE) for c in range(SIDE)
                     if not (edge(r) and edge(c))])


def load_digits(source: Path):
    if source.suffix == ".whl":
        with zipfile.ZipFile(source) as z:
            raw = z.read("mlxtend/data/data/mnist_5k.csv.gz")
    else:
        raw = source.read_bytes()
    text = gzip.decompress(raw).decode()
    rows = np.loadtxt(io.StringIO(text), delimiter=",", dtype=np.float64)
    pixels = rows[:, :784] / 255.0
    labels = rows[:, 784].astype(np.int64)
    spikes = (pixels[:, kept_pixel_indices()] > 0.5).astype(np.uint8)
    return spikes, labels


def sign(x):
    # sign(0) = +1, matching V_mem >= V_th.
    return torch.where(x >= 0, torch.ones_like(x), -torch.ones_like(x))


class SignSTE(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x):
        ctx.save_for_backward(x)
        return sign(x)

    @staticmethod
    def backward(ctx, g):
        (x,) = ctx.saved_tensors
        return g * (x.abs() <= 1).to(g.dtype)


class BinaryLinear(nn.Module):
    def __init__(self, n_in, n_out):
        super().__init__()
        self.weight = nn.Parameter(torch.empty(n_in, n_out).uniform_(-1, 1))

    def forward(self, x):
        return x @ SignSTE.apply(self.weight)


class Bnn(nn.Module):
    def __init__(self):
        super().__init__()
        self.hidden = nn.ModuleList()
        self.norms = nn.ModuleList()
        self.biases = nn.ParameterList()
        for n_in, n_out in zip(TOPOLOGY[:-2], TOPOLOGY[1:-1]):
            self.hidden.append(BinaryLinear(n_in, n_out))
            self.norms.append(nn.BatchNorm1d(n_out, affine=False))
            self.biases.append(nn.Parameter(torch.zeros(n_out)))
        self.out = BinaryLinear(TOPOLOGY[-2], TOPOLOGY[-1])
        self.scale = nn.Parameter(torch.tensor(0.1))

    def forward(self, x):
        h = 2 * x - 1
        for lin, norm, b in zip(self.hidden, self.norms, self.biases):
            h = SignSTE.apply(norm(lin(h)) + b)
        # Output score: sum of weights over active (+1) inputs.
        return self.out((h + 1) / 2) * self.scale


def export_layers(model):
    layers = []
    for lin, norm, b in zip(model.hidden, model.norms, model.biases):
        w = sign(lin.weight.detach()).to(torch.int64)
        sigma = torch.sqrt(norm.running_var + norm.eps)
        # (z - mu) / sigma + beta >= 0  <=>  z + (beta * sigma - mu) >= 0
        bias = (b.detach() * sigma - norm.running_mean).to(torch.float32)
        layers.append((w.numpy(), bias.numpy().astype(np.float64)))
    w = sign(model.out.weight.detach()).to(torch.int64)
    layers.append((w.numpy(), np.zeros(TOPOLOGY[-1])))
    return layers


def integer_forward(layers, spikes):
    h = 2 * spikes.astype(np.int64) - 1
    for w, b in layers[:-1]:
        h = np.where(h @ w + b >= 0, 1, -1)
    scores = ((h + 1) // 2) @ layers[-1][0]
    return np.argmax(scores, axis=1)


def write_samples(path, spikes, labels):
    count, width = spikes.shape
    with open(path, "wb") as f:
        f.write(struct.pack("<II", count, width))
        for s, y in zip(spikes, labels):
            f.write(np.packbits(s, bitorder="big").tobytes())
            f.write(bytes([int(y)]))


def write_bnn(path, layers, accuracy, samples, seed):
    doc = {
        "format_version": 1,
        "kind": "bnn",
        "topology": TOPOLOGY,
        "metadata": {
            "bnn_accuracy": accuracy,
            "accuracy_samples": samples,
            "trainer_seed": seed,
            "preprocessing": "drop 2x2 corners, row-major, spike = pixel/255 > 0.5",
            "description": "mnist_5k fixture: 4000 train / 1000 held-out",
        },
        "layers": [
            {"rows": int(w.shape[0]), "cols": int(w.shape[1]),
             "weights": w.tolist(), "biases": [float(x) for x in b]}
            for w, b in layers
        ],
    }
    with open(path, "w") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--source", type=Path, required=True)
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=150)
    args = ap.parse_args()

    torch.manual_seed(args.seed)
    rng = np.random.default_rng(args.seed)
    spikes, labels = load_digits(args.source)
    order = rng.permutation(len(labels))
    train, test = order[:4000], order[4000:]

    x = torch.tensor(spikes[train], dtype=torch.float32)
    y = torch.tensor(labels[train])
    model = Bnn()
    opt = torch.optim.Adam(model.parameters(), lr=1e-2)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, args.epochs)
    for epoch in range(args.epochs):
        model.train()
        perm = torch.randperm(len(y))
        for i in range(0, len(y), 100):
            idx = perm[i:i + 100]
            loss = F.cross_entropy(model(x[idx]), y[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
            with torch.no_grad():
                for p in [l.weight for l in model.hidden] + [model.out.weight]:
                    p.clamp_(-1, 1)
        sched.step()

    model.eval()
    layers = export_layers(model)
    pred = integer_forward(layers, spikes[test])
    accuracy = float(np.mean(pred == labels[test]))
    print(f"held-out accuracy {accuracy:.4f} on {len(test)} digits")

    args.out.mkdir(parents=True, exist_ok=True)
    write_bnn(args.out / "mnist_bnn.json", layers, accuracy, len(test), args.seed)
    write_samples(args.out / "mnist_test.bin", spikes[test], labels[test])


if __name__ == "__main__":
    main()
