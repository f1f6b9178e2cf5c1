"""A tiny fully-connected policy/value network with handwritten backprop.

Architecture: flatten -> tanh hidden layer -> value head (tanh scaled to
the game's score range) + policy head (max-subtracted softmax over the
full action space). Training is plain SGD on mean squared value error
(on the tanh scale) plus policy cross-entropy. No autodiff; gradients
are derived by hand and checked against finite differences in tests.

Forward passes loop item by item, so results are independent of how
states are grouped into batches.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from . import kernels
from .evaluators import Evaluator
from .games.base import Game, GameConfig, GameKind

CHECKPOINT_MAGIC = b"GSTNET\x00\x00"
CHECKPOINT_VERSION = 1
ARRAY_NAMES = ("w1", "b1", "w2", "b2", "wv", "bv")


class TinyNet:
    def __init__(
        self,
        input_shape: tuple,
        n_actions: int,
        hidden_size: int,
        score_scale: float,
        game_config: "GameConfig | None" = None,
    ):
        self.input_shape = tuple(int(d) for d in input_shape)
        self.n_in = int(np.prod(self.input_shape))
        self.n_actions = int(n_actions)
        self.hidden_size = int(hidden_size)
        self.score_scale = float(score_scale)
        self.game_config = game_config
        self.step = 0
        self.w1 = np.zeros((self.hidden_size, self.n_in))
        self.b1 = np.zeros(self.hidden_size)
        self.w2 = np.zeros((self.n_actions, self.hidden_size))
        self.b2 = np.zeros(self.n_actions)
        self.wv = np.zeros(self.hidden_size)
        self.bv = np.zeros(1)

    @classmethod
    def for_game(cls, game: Game, hidden_size: int = 64, seed: "int | None" = 0) -> "TinyNet":
        """Fresh net for a game; random hidden layer, zero heads.

        Zero heads mean the untrained net plays a uniform policy with
        value 0, which is the sensible blank-slate prior. seed=None
        leaves every weight zero.
        """
        net = cls(
            game.encoding_shape(),
            game.action_space_size,
            hidden_size,
            game.max_score(),
            game.config,
        )
        if seed is not None:
            rng = np.random.default_rng(seed)
            net.w1 = rng.normal(0.0, 1.0 / np.sqrt(net.n_in), size=net.w1.shape)
        return net

    # -- forward ---------------------------------------------------------

    def _forward(self, x: np.ndarray):
        h = np.tanh(self.w1 @ x + self.b1)
        vhat = float(np.tanh(self.wv @ h + self.bv[0]))
        logits = self.w2 @ h + self.b2
        shifted = logits - logits.max()
        exp = np.exp(shifted)
        policy = exp / exp.sum()
        return h, vhat, policy

    def forward_batch(self, xb: np.ndarray):
        """Kernel forward over stacked flat inputs.

        Returns (values in score units, exponentiated max-subtracted
        policy logits); rows are computed item by item, so the outputs
        are the same however the items are grouped into batches.
        """
        values = np.empty(xb.shape[0])
        weights = np.empty((xb.shape[0], self.n_actions))
        kernels.net_forward(
            xb, self.w1, self.b1, self.w2, self.b2, self.wv,
            float(self.bv[0]), self.score_scale, values, weights,
        )
        return values, weights

    def predict(self, encoding: np.ndarray):
        """(value in score units, policy over the full action space)."""
        if tuple(encoding.shape) != self.input_shape:
            raise ValueError(
                f"encoding shape {tuple(encoding.shape)} != expected {self.input_shape}"
            )
        xb = encoding.astype(np.float64).reshape(1, self.n_in)
        values, weights = self.forward_batch(xb)
        return float(values[0]), weights[0] / weights[0].sum()

    # -- training --------------------------------------------------------

    def loss_and_grads(
        self,
        encodings: np.ndarray,
        target_policies: np.ndarray,
        target_values: np.ndarray,
    ):
        """Mean loss and gradient arrays over a batch.

        target_values are in game-score units; the value error is taken
        on the tanh output scale so both loss terms are O(1).
        """
        batch = encodings.shape[0]
        if batch < 1:
            raise ValueError("empty batch")
        grads = {name: np.zeros_like(getattr(self, name)) for name in ARRAY_NAMES}
        loss = 0.0
        for i in range(batch):
            x = encodings[i].astype(np.float64).ravel()
            target_pi = target_policies[i].astype(np.float64)
            y = float(target_values[i]) / self.score_scale
            h, vhat, policy = self._forward(x)
            d_value = vhat - y
            ce = -float(np.sum(target_pi * np.log(policy + 1e-300)))
            loss += d_value * d_value + ce
            d_vlogit = 2.0 * d_value * (1.0 - vhat * vhat) / batch
            d_plogits = (policy - target_pi) / batch
            grads["wv"] += d_vlogit * h
            grads["bv"][0] += d_vlogit
            grads["w2"] += np.outer(d_plogits, h)
            grads["b2"] += d_plogits
            d_h = self.wv * d_vlogit + self.w2.T @ d_plogits
            d_hpre = d_h * (1.0 - h * h)
            grads["w1"] += np.outer(d_hpre, x)
            grads["b1"] += d_hpre
        return loss / batch, grads

    def train_step(
        self,
        encodings: np.ndarray,
        target_policies: np.ndarray,
        target_values: np.ndarray,
        learning_rate: float,
    ) -> float:
        loss, grads = self.loss_and_grads(encodings, target_policies, target_values)
        for name in ARRAY_NAMES:
            arr = getattr(self, name)
            arr -= learning_rate * grads[name]
        self.step += 1
        return loss

    # -- flat-weight access (finite-difference checks) ---------------------

    def get_flat(self) -> np.ndarray:
        return np.concatenate([getattr(self, n).ravel() for n in ARRAY_NAMES])

    def set_flat(self, flat: np.ndarray) -> None:
        pos = 0
        for name in ARRAY_NAMES:
            arr = getattr(self, name)
            n = arr.size
            arr[...] = flat[pos : pos + n].reshape(arr.shape)
            pos += n
        if pos != flat.size:
            raise ValueError("flat vector has the wrong length")

    # -- persistence -------------------------------------------------------

    def _header(self) -> dict:
        cfg = None
        if self.game_config is not None:
            cfg = {
                "game": self.game_config.game.value,
                "width": self.game_config.width,
                "height": self.game_config.height,
                "connect_k": self.game_config.connect_k,
            }
        return {
            "input_shape": list(self.input_shape),
            "n_actions": self.n_actions,
            "hidden_size": self.hidden_size,
            "score_scale": self.score_scale,
            "game_config": cfg,
            "step": self.step,
            "arrays": [
                {"name": n, "shape": list(getattr(self, n).shape)} for n in ARRAY_NAMES
            ],
        }

    def save(self, path) -> None:
        """Little-endian binary: magic, version, JSON header, float64 arrays."""
        header = json.dumps(self._header()).encode("utf-8")
        with open(path, "wb") as f:
            f.write(CHECKPOINT_MAGIC)
            f.write(struct.pack("<II", CHECKPOINT_VERSION, len(header)))
            f.write(header)
            for name in ARRAY_NAMES:
                arr = np.ascontiguousarray(getattr(self, name), dtype="<f8")
                f.write(arr.tobytes())

    @classmethod
    def load(cls, path) -> "TinyNet":
        with open(path, "rb") as f:
            magic = f.read(len(CHECKPOINT_MAGIC))
            if magic != CHECKPOINT_MAGIC:
                raise ValueError("not a checkpoint file")
            version, header_len = struct.unpack("<II", f.read(8))
            if version != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {version}")
            header = json.loads(f.read(header_len).decode("utf-8"))
            cfg = None
            if header["game_config"] is not None:
                c = header["game_config"]
                cfg = GameConfig(
                    GameKind(c["game"]), c["width"], c["height"], c["connect_k"]
                )
            net = cls(
                tuple(header["input_shape"]),
                header["n_actions"],
                header["hidden_size"],
                header["score_scale"],
                cfg,
            )
            net.step = header["step"]
            for spec in header["arrays"]:
                shape = tuple(spec["shape"])
                n = int(np.prod(shape)) if shape else 1
                data = np.frombuffer(f.read(8 * n), dtype="<f8").reshape(shape)
                setattr(net, spec["name"], data.astype(np.float64).copy())
        return net

    def to_json_dict(self) -> dict:
        """Inspection-friendly export (arrays as nested lists)."""
        out = self._header()
        out["weights"] = {n: getattr(self, n).tolist() for n in ARRAY_NAMES}
        return out


class NetEvaluator(Evaluator):
    """Evaluator backed by a TinyNet.

    The kernel forward skips the softmax denominator, since the base
    class renormalizes the masked policy anyway.
    """

    name = "tinynet"

    def __init__(self, net: TinyNet):
        super().__init__()
        self.net = net

    def _evaluate(self, game, states, masks):
        xb = np.empty((len(states), self.net.n_in), dtype=np.float64)
        game.encode_into(states, xb)
        return self.net.forward_batch(xb)
