"""Plain-text model files.

::

    fireseverity-gbt 1
    prng numpy-pcg64
    config n_estimators=500 learning_rate=0.1 ...
    base_score <float>
    learning_rate <float>
    feature_count <int>
    features <name> <name> ...
    trees <int>
    tree <i> used=<f,f,...> <node>
    ...
    end

A node is ``(leaf <weight>)`` or ``(split <feature> <threshold> <gain> <left> <right>)``.
Floats are written with ``repr`` so they parse back bit-identically.
"""

from __future__ import annotations

import os
import re
from dataclasses import asdict

import numpy as np

from ..errors import InputError
from .model import PRNG_NAME, GbtConfig, GbtModel
from .tree import Tree

MAGIC = "fireseverity-gbt"
VERSION = 1

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _node_text(tree: Tree, i: int) -> str:
    if tree.feature[i] < 0:
        return f"(leaf {float(tree.value[i])!r})"
    return (
        f"(split {int(tree.feature[i])} {float(tree.threshold[i])!r} {float(tree.gain[i])!r} "
        f"{_node_text(tree, tree.left[i])} {_node_text(tree, tree.right[i])})"
    )


def dumps(model: GbtModel) -> str:
    for name in model.feature_names:
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"feature name {name!r} cannot be serialised")
    cfg = " ".join(f"{k}={v!r}" for k, v in asdict(model.config).items())
    lines = [
        f"{MAGIC} {VERSION}",
        f"prng {PRNG_NAME}",
        f"config {cfg}",
        f"base_score {model.base_score!r}",
        f"learning_rate {model.learning_rate!r}",
        f"feature_count {model.feature_count}",
        "features " + " ".join(model.feature_names),
        f"trees {len(model.trees)}",
    ]
    for i, t in enumerate(model.trees):
        used = ",".join(str(f) for f in t.used_features)
        lines.append(f"tree {i} used={used} {_node_text(t, 0)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


class _TreeParser:
    def __init__(self, tokens: list[str], lineno: int):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno
        self.feature, self.threshold, self.left, self.right, self.value, self.gain = (
            [], [], [], [], [], []
        )

    def fail(self, msg: str):
        raise InputError(f"model line {self.lineno}: {msg}")

    def next(self) -> str:
        if self.pos >= len(self.tokens):
            self.fail("unexpected end of tree")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def number(self, cast):
        tok = self.next()
        try:
            return cast(tok)
        except ValueError:
            self.fail(f"bad number {tok!r}")

    def node(self) -> int:
        if self.next() != "(":
            self.fail("expected '('")
        idx = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        self.gain.append(0.0)
        kind = self.next()
        if kind == "leaf":
            self.value[idx] = self.number(float)
        elif kind == "split":
            self.feature[idx] = self.number(int)
            self.threshold[idx] = self.number(float)
            self.gain[idx] = self.number(float)
            self.left[idx] = self.node()
            self.right[idx] = self.node()
        else:
            self.fail(f"unknown node kind {kind!r}")
        if self.next() != ")":
            self.fail("expected ')'")
        return idx

    def tree(self, used) -> Tree:
        self.node()
        if self.pos != len(self.tokens):
            self.fail("trailing tokens after tree")
        return Tree(
            np.array(self.feature, dtype=np.int32), np.array(self.threshold),
            np.array(self.left, dtype=np.int32), np.array(self.right, dtype=np.int32),
            np.array(self.value), np.array(self.gain), used,
        )


def loads(text: str) -> GbtModel:
    lines = text.splitlines()

    def fail(n, msg):
        raise InputError(f"model line {n}: {msg}")

    def field(n, key):
        if n > len(lines):
            fail(n, f"missing '{key}' line")
        parts = lines[n - 1].split(" ", 1)
        if parts[0] != key:
            fail(n, f"expected '{key}', found {parts[0]!r}")
        return parts[1] if len(parts) > 1 else ""

    head = lines[0].split() if lines else []
    if len(head) != 2 or head[0] != MAGIC:
        fail(1, "not a fireseverity model file")
    if head[1] != str(VERSION):
        fail(1, f"unsupported model version {head[1]} (reader is {VERSION})")
    if field(2, "prng") != PRNG_NAME:
        fail(2, "unknown PRNG")
    try:
        cfg = dict(kv.split("=", 1) for kv in field(3, "config").split())
        config = GbtConfig.from_mapping(cfg)
    except ValueError as exc:
        fail(3, f"bad config ({exc})")
    try:
        base = float(field(4, "base_score"))
    except ValueError:
        fail(4, "bad base_score")
    try:
        lr = float(field(5, "learning_rate"))
    except ValueError:
        fail(5, "bad learning_rate")
    try:
        nfeat = int(field(6, "feature_count"))
    except ValueError:
        fail(6, "bad feature_count")
    names = tuple(field(7, "features").split())
    if len(names) != nfeat:
        fail(7, "feature name count differs from feature_count")
    try:
        ntrees = int(field(8, "trees"))
    except ValueError:
        fail(8, "bad tree count")
    trees = []
    for i in range(ntrees):
        n = 9 + i
        rest = field(n, "tree")
        parts = rest.split(" ", 2)
        if len(parts) != 3 or parts[0] != str(i) or not parts[1].startswith("used="):
            fail(n, "malformed tree header")
        try:
            used = tuple(int(v) for v in parts[1][5:].split(",") if v)
        except ValueError:
            fail(n, "malformed used-feature list")
        tree = _TreeParser(_TOKEN.findall(parts[2]), n).tree(used)
        if tree.feature.max(initial=-1) >= nfeat:
            fail(n, "feature index out of range")
        trees.append(tree)
    if field(9 + ntrees, "end") != "":
        fail(9 + ntrees, "unexpected content after 'end'")
    return GbtModel(base, tuple(trees), lr, nfeat, names, config)


def save(model: GbtModel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def load(path: str | os.PathLike) -> GbtModel:
    if not os.path.isfile(path):
        raise InputError(f"model file not found: {os.fspath(path)}")
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
