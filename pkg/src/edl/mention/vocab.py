"""Token vocabulary with a reserved UNK id for out-of-vocabulary words."""

from __future__ import annotations

from collections import Counter

UNK = "<unk>"


class Vocab:
    def __init__(self, tokens=()):
        self._id = {UNK: 0}
        for tok in tokens:
            if tok not in self._id:
                self._id[tok] = len(self._id)
        self._tokens = list(self._id)

    @classmethod
    def build(cls, token_iter, max_size=None):
        """Frequency-ordered vocabulary (ties broken lexicographically)."""
        counts = Counter(token_iter)
        ordered = sorted(counts, key=lambda t: (-counts[t], t))
        if max_size is not None:
            ordered = ordered[:max_size - 1]
        return cls(ordered)

    def __len__(self):
        return len(self._tokens)

    def id(self, token):
        return self._id.get(token, 0)

    def ids(self, tokens):
        return [self.id(t) for t in tokens]

    def token(self, idx):
        return self._tokens[idx]

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for tok in self._tokens[1:]:
                fh.write(tok + "\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls(line.rstrip("\n") for line in fh if line.rstrip("\n"))
