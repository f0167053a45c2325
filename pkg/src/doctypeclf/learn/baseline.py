"""Random class assignment: a seeded fair coin per work key."""

import hashlib


def coin(seed: int, key: str) -> float:
    digest = hashlib.sha256(f"{seed}:{key}".encode("utf-8")).digest()
    return float(digest[0] & 1)
