#!/usr/bin/env python3
# Copyright 2026 The reverbkit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS-IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled dry test clips: 8 kHz, 16-bit mono, voiced-like.

Each clip is a harmonic tone with a gliding pitch and syllable-rate
amplitude envelope. Output is fully determined by the clip index.
"""

import argparse
import math
import pathlib
import random
import struct
import wave

FS = 8000


def clip(index):
    rng = random.Random(1000 + index)
    seconds = 1.0 + 0.25 * index
    n = int(seconds * FS)
    f0 = rng.uniform(95.0, 230.0)
    glide = rng.uniform(-0.25, 0.25)
    syllable_hz = rng.uniform(3.0, 5.5)
    harmonics = [rng.uniform(0.3, 1.0) / (k + 1) for k in range(12)]
    phase = 0.0
    out = []
    for i in range(n):
        t = i / FS
        f = f0 * (1.0 + glide * math.sin(2 * math.pi * 0.7 * t))
        phase += 2 * math.pi * f / FS
        env = max(0.0, math.sin(math.pi * syllable_hz * t)) ** 2
        v = sum(a * math.sin((k + 1) * phase)
                for k, a in enumerate(harmonics) if (k + 1) * f < FS / 2)
        v = env * v + 0.01 * rng.gauss(0.0, 1.0)
        out.append(v)
    peak = max(abs(v) for v in out)
    return [0.5 * v / peak for v in out]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/clips")
    ap.add_argument("--count", type=int, default=6)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        samples = clip(i)
        with wave.open(str(out / f"clip_{i:02d}.wav"), "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(2)
            w.setframerate(FS)
            w.writeframes(b"".join(
                struct.pack("<h", max(-32768, min(32767, round(v * 32767))))
                for v in samples))


if __name__ == "__main__":
    main()
