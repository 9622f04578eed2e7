#!/usr/bin/env python3
# tests/fixtures/make_fixtures.py

# Copyright 2026 The pse-eval Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the committed oracle fixtures. Run once; outputs are frozen.

  estoi/pair_XX.{clean,degraded}.wav  float32 16 kHz speech-like pairs
  estoi/expected.json                  pystoi extended-mode scores
  table/generalist_m.records.jsonl     per-utterance records
  table/generalist_m.md                expected markdown rendering

Requires numpy, scipy, pystoi.
"""

import json
import os

import numpy as np
from scipy.io import wavfile
from scipy.signal import lfilter
from pystoi import stoi

FS = 16000
HERE = os.path.dirname(os.path.abspath(__file__))


def speech_like(rng, seconds):
    """Voiced syllables with pauses: harmonic source, formant-ish filtering,
    syllabic envelope and a couple of unvoiced bursts."""
    n = int(seconds * FS)
    t = np.arange(n) / FS
    f0 = 110 + 60 * rng.random() + 25 * np.sin(2 * np.pi * 0.7 * t + rng.random() * 6)
    phase = 2 * np.pi * np.cumsum(f0) / FS
    src = sum(np.cos(k * phase) / k for k in range(1, 25))
    for fc in (500 + 300 * rng.random(), 1500 + 500 * rng.random()):
        r = 0.97
        a = [1, -2 * r * np.cos(2 * np.pi * fc / FS), r * r]
        src = lfilter([1 - r], a, src)
    env = np.clip(np.sin(2 * np.pi * (3.0 + 2.0 * rng.random()) * t + rng.random() * 6), 0, None)
    gaps = np.ones(n)
    for _ in range(2):
        start = rng.integers(0, n - FS // 4)
        gaps[start:start + FS // 5] = 0.0
    x = src * env * gaps
    for _ in range(3):
        start = rng.integers(0, n - FS // 10)
        x[start:start + FS // 12] += 0.3 * rng.standard_normal(FS // 12)
    return 0.5 * x / np.max(np.abs(x))


def at_snr(clean, noise, snr_db):
    g = np.sqrt(np.mean(clean ** 2) / (np.mean(noise ** 2) * 10 ** (snr_db / 10)))
    return clean + g * noise


def degrade(rng, k, clean):
    n = len(clean)
    if k == 0:
        return at_snr(clean, rng.standard_normal(n), 10)
    if k == 1:
        return at_snr(clean, rng.standard_normal(n), 0)
    if k == 2:
        return at_snr(clean, rng.standard_normal(n), -5)
    if k == 3:
        return at_snr(clean, speech_like(rng, n / FS), 0)
    if k == 4:
        return lfilter([1.0], [1.0, -0.95], clean) * 0.1
    if k == 5:
        return np.clip(clean * 4, -0.3, 0.3)
    if k == 6:
        rir = rng.standard_normal(FS // 4) * np.exp(-np.arange(FS // 4) / (0.05 * FS))
        rir[0] = 1.0
        return np.convolve(clean, rir)[:n] * 0.2
    if k == 7:
        return clean * (0.5 + 0.5 * np.sin(2 * np.pi * 8 * np.arange(n) / FS))
    if k == 8:
        return at_snr(np.roll(clean, 40), rng.standard_normal(n), 5)
    return at_snr(clean, np.cumsum(rng.standard_normal(n)) * 0.01, 3)


def write_estoi():
    out = os.path.join(HERE, "estoi")
    os.makedirs(out, exist_ok=True)
    expected = {}
    for k in range(10):
        rng = np.random.default_rng(1000 + k)
        clean = speech_like(rng, 2.5 + 0.1 * k).astype(np.float32)
        deg = degrade(rng, k, clean.astype(np.float64))
        deg = (0.9 * deg / max(1.0, np.max(np.abs(deg)) / 0.9)).astype(np.float32)
        name = "pair_%02d" % k
        wavfile.write(os.path.join(out, name + ".clean.wav"), FS, clean)
        wavfile.write(os.path.join(out, name + ".degraded.wav"), FS, deg)
        np.random.seed(0)
        expected[name] = float(stoi(clean.astype(np.float64), deg.astype(np.float64), FS,
                                    extended=True))
    with open(os.path.join(out, "expected.json"), "w") as f:
        json.dump(expected, f, indent=2, sort_keys=True)
        f.write("\n")


def write_table():
    out = os.path.join(HERE, "table")
    os.makedirs(out, exist_ok=True)
    # Generalist, medium size, real-world speakers (10 x 45 mixtures).
    targets = [("sdri", "SDRI", 9.495, 1.0), ("sdr", "SDR", 9.997, 1.0),
               ("estoi", "eSTOI", 0.708, 0.1), ("pesq", "PESQ", 1.487, 0.2)]
    n = 450
    condition = "Generalist/M"
    lines = []
    cells = []
    for name, _, mean, delta in targets:
        values = [mean + delta] * 150 + [mean - delta] * 150 + [mean] * 150
        for i, v in enumerate(values):
            lines.append(json.dumps({"condition": condition, "metric": name,
                                     "utterance_id": "mix_%03d" % i, "value": v},
                                    sort_keys=True))
        # Closed form: sample stddev = delta * sqrt(300 / 449).
        hw = 1.96 * delta * np.sqrt(300.0 / (n - 1))
        cells.append("%.3f±%.3f" % (mean, hw))
    with open(os.path.join(out, "generalist_m.records.jsonl"), "w") as f:
        f.write("\n".join(lines) + "\n")
    md = "| Condition | " + " | ".join(t[1] for t in targets) + " |\n"
    md += "|---|" + "---:|" * len(targets) + "\n"
    md += "| " + condition + " | " + " | ".join(cells) + " |\n"
    md += "\n± = 1.96 × sample standard deviation (spread_1p96)\n"
    with open(os.path.join(out, "generalist_m.md"), "w") as f:
        f.write(md)


if __name__ == "__main__":
    write_estoi()
    write_table()
