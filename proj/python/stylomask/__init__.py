# Copyright 2026 The Stylomask Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the stylomask core.

Most functions are thin wrappers; the ones returning structured data decode
the JSON produced by the C++ layer so the field names match the CLI files.
"""

import json
import socket

from . import _stylomask
from ._stylomask import (
    MASK_TOKEN,
    PROTOCOL_VERSION,
    Classifier,
    ConfigError,
    DataError,
    EmbeddingStore,
    ProtocolError,
    ProviderError,
    TimeoutError,
    ToyServer,
    flip,
    leet,
    meteor,
    omission_scores,
    preprocess,
    random_space,
)

__all__ = [
    "MASK_TOKEN",
    "PROTOCOL_VERSION",
    "Classifier",
    "ConfigError",
    "DataError",
    "EmbeddingStore",
    "FrameDecoder",
    "ProtocolError",
    "ProviderError",
    "TimeoutError",
    "ToyServer",
    "encode_frame",
    "flip",
    "generate_synthetic",
    "leet",
    "meteor",
    "omission_scores",
    "preprocess",
    "random_space",
    "request",
    "run_attack",
]


def run_attack(model, tokens, label, config=None, embeddings=None, lm_endpoint=""):
    """Attack one tokenized document. `config` uses the CLI's field names."""
    out = _stylomask._run_attack(
        model, list(tokens), label, json.dumps(config or {}), embeddings, lm_endpoint
    )
    return json.loads(out)


def generate_synthetic(**config):
    return json.loads(_stylomask._generate_synthetic(json.dumps(config)))


def encode_frame(message):
    """Length-prefixed frame for a protocol message given as a dict."""
    return _stylomask._encode_frame(json.dumps(message))


class FrameDecoder:
    """Splits a byte stream into protocol messages (dicts)."""

    def __init__(self):
        self._d = _stylomask._FrameDecoder()

    def feed(self, data):
        self._d.feed(bytes(data))

    def next(self):
        body = self._d.next()
        return None if body is None else json.loads(body)

    @property
    def buffered(self):
        return self._d.buffered


def request(host, port, messages, timeout=10.0):
    """Handshake, send `messages`, return the replies in arrival order."""
    replies = []
    dec = FrameDecoder()
    with socket.create_connection((host, port), timeout=timeout) as s:
        s.sendall(encode_frame({"type": "hello", "version": PROTOCOL_VERSION,
                                "agent": "stylomask-py", "dim": 0}))
        s.sendall(b"".join(encode_frame(m) for m in messages))
        want = len(messages) + 1
        while len(replies) < want:
            msg = dec.next()
            if msg is not None:
                replies.append(msg)
                continue
            chunk = s.recv(65536)
            if not chunk:
                break
            dec.feed(chunk)
    return replies[1:] if replies and replies[0].get("type") == "hello" else replies


