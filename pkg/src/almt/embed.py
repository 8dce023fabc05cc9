"""Embedding ingestion, kNN, and ratio-based similarity scores.

Vectors are ingested from files, never computed here. The ratio score divides
the cosine of a pair by the average cosine of each side's k nearest
neighbors; by default neighborhoods are drawn from the opposing corpus
(margin-scoring convention), switchable to same-pool.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DegenerateNeighborhoodError, DegenerateVectorError, ParseError


class EmbeddingStore:
    """Immutable map from sentence id to a fixed-dimension real vector."""

    def __init__(self, ids, matrix, tag=""):
        self.tag = tag
        self.ids = list(ids)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.ids):
            raise ValueError("matrix shape does not match id count")
        if not np.isfinite(self.matrix).all():
            raise ValueError(f"store {tag!r} contains NaN/Inf components")
        self.dim = self.matrix.shape[1]
        self.row = {}
        for i, sid in enumerate(self.ids):
            if sid in self.row:
                raise ValueError(f"duplicate id {sid} in store {tag!r}")
            self.row[sid] = i
        norms = np.linalg.norm(self.matrix, axis=1)
        self.degenerate_ids = {self.ids[i] for i in np.nonzero(norms == 0.0)[0]}
        safe = np.where(norms == 0.0, 1.0, norms)
        self.unit = self.matrix / safe[:, None]

    def __len__(self):
        return len(self.ids)

    def __contains__(self, sid):
        return sid in self.row

    def vector(self, sid):
        return self.matrix[self.row[sid]]

    def unit_vector(self, sid):
        if sid in self.degenerate_ids:
            raise DegenerateVectorError(f"zero-norm vector for id {sid} in store {self.tag!r}")
        return self.unit[self.row[sid]]

    def subset(self, ids, tag=None):
        rows = [self.row[sid] for sid in ids]
        return EmbeddingStore(list(ids), self.matrix[rows], tag or self.tag)

    @classmethod
    def load(cls, path, tag=""):
        """Parse the "dim=D" header then "id TAB v1 v2 ... vD" lines."""
        ids, vecs = [], []
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("dim="):
                raise ParseError(f"{path}:1: expected 'dim=D' header, got {header!r}")
            dim = int(header[4:])
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    sid_str, vec_str = line.rstrip("\n").split("\t")
                    vec = np.array([float(v) for v in vec_str.split()])
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: malformed embedding line")
                if vec.shape[0] != dim:
                    raise ParseError(f"{path}:{lineno}: expected {dim} components, got {vec.shape[0]}")
                ids.append(int(sid_str))
                vecs.append(vec)
        matrix = np.array(vecs) if vecs else np.zeros((0, dim))
        return cls(ids, matrix, tag)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"dim={self.dim}\n")
            for sid in self.ids:
                fh.write(f"{sid}\t{' '.join(repr(float(v)) for v in self.vector(sid))}\n")


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise DegenerateVectorError("cosine of zero-norm vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _topk_mean(cosines: np.ndarray, k: int) -> float:
    """Mean of the k largest entries (truncated when fewer are available)."""
    if cosines.size == 0:
        raise DegenerateNeighborhoodError("empty neighbor pool")
    k = min(k, cosines.size)
    top = np.partition(cosines, cosines.size - k)[cosines.size - k:]
    return float(top.mean())


def _pool_cosines(query_unit, pool: EmbeddingStore, exclude_id=None):
    cos = pool.unit @ query_unit
    keep = np.ones(len(pool), dtype=bool)
    for sid in pool.degenerate_ids:
        keep[pool.row[sid]] = False
    if exclude_id is not None and exclude_id in pool:
        keep[pool.row[exclude_id]] = False
    return cos, keep


def knn(query, pool: EmbeddingStore, k: int, query_store: EmbeddingStore = None):
    """Top-k pool entries by cosine to the query, ties by ascending id.

    The query is excluded from its own neighbor list when it lives in `pool`
    (the default when query_store is omitted).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    store = query_store or pool
    if query not in store:
        raise KeyError(f"query id {query} not in store {store.tag!r}")
    q = store.unit_vector(query)
    exclude = query if store is pool else None
    cos, keep = _pool_cosines(q, pool, exclude_id=exclude)
    cand = [(float(np.clip(cos[i], -1.0, 1.0)), pool.ids[i]) for i in np.nonzero(keep)[0]]
    cand.sort(key=lambda t: (-t[0], t[1]))
    return [(sid, c) for c, sid in cand[:k]]


def _neighborhood_mean(query, query_store, pool, k):
    q = query_store.unit_vector(query)
    exclude = query if query_store is pool else None
    cos, keep = _pool_cosines(q, pool, exclude_id=exclude)
    return _topk_mean(cos[keep], k)


def ratio_score(x, x_prime, pool_x: EmbeddingStore, pool_x_prime: EmbeddingStore,
                k: int, neighbor_mode: str = "cross") -> float:
    """cos(x, x') normalized by the mean of both points' k-NN cosines.

    neighbor_mode "cross" (default): x's neighbors come from pool_x_prime and
    x's neighbors from pool_x; "same": each point's neighbors come from its
    own pool, excluding itself.
    """
    c = cosine(pool_x.vector(x), pool_x_prime.vector(x_prime))
    if neighbor_mode == "cross":
        m_x = _neighborhood_mean(x, pool_x, pool_x_prime, k)
        m_xp = _neighborhood_mean(x_prime, pool_x_prime, pool_x, k)
    elif neighbor_mode == "same":
        m_x = _neighborhood_mean(x, pool_x, pool_x, k)
        m_xp = _neighborhood_mean(x_prime, pool_x_prime, pool_x_prime, k)
    else:
        raise ValueError(f"unknown neighbor_mode {neighbor_mode!r}")
    denom = (m_x + m_xp) / 2.0
    if denom <= 0.0:
        raise DegenerateNeighborhoodError(f"non-positive denominator {denom} for pair ({x}, {x_prime})")
    return c / denom


def dist_to_labeled(x, pool_x: EmbeddingStore, labeled: EmbeddingStore, k: int,
                    mode: str = "literal", neighbor_mode: str = "cross") -> float:
    """Distance of x from a labeled pool.

    "literal" takes the minimum ratio over the labeled pool; "nn" takes the
    maximum (similarity to the nearest labeled neighbor).
    """
    if len(labeled) == 0:
        raise ValueError("labeled pool is empty")
    scores = [ratio_score(x, xp, pool_x, labeled, k, neighbor_mode) for xp in labeled.ids]
    return min(scores) if mode == "literal" else max(scores)


def nearest_similarity(x, pool_x: EmbeddingStore, pool: EmbeddingStore, k: int,
                       neighbor_mode: str = "cross") -> float:
    """Corpus-level similarity: max ratio of x against every pool member."""
    if len(pool) == 0:
        raise ValueError("pool is empty")
    return max(ratio_score(x, z, pool_x, pool, k, neighbor_mode) for z in pool.ids)


class RatioScorer:
    """Batch all-pairs ratio scores between two stores.

    Precomputes the cosine matrix and per-point neighborhood means once;
    row/column reductions then give CSSE scores and retrieval rankings.
    Chunked matmul keeps results bit-identical for any worker count.
    """

    def __init__(self, store_a: EmbeddingStore, store_b: EmbeddingStore, k: int,
                 neighbor_mode: str = "cross", workers: int = 1):
        self.a, self.b, self.k = store_a, store_b, k
        self.cos = self._matmul_chunked(store_a.unit, store_b.unit.T, workers)
        bad_a = [store_a.row[i] for i in store_a.degenerate_ids]
        bad_b = [store_b.row[i] for i in store_b.degenerate_ids]
        valid_a = np.ones(len(store_a), dtype=bool)
        valid_a[bad_a] = False
        valid_b = np.ones(len(store_b), dtype=bool)
        valid_b[bad_b] = False
        self.valid_a, self.valid_b = valid_a, valid_b

        if neighbor_mode == "cross":
            cos_aa = self.cos
            cos_bb = self.cos.T
            mask_a, mask_b = valid_b, valid_a
            excl_a = excl_b = None
        elif neighbor_mode == "same":
            cos_aa = self._matmul_chunked(store_a.unit, store_a.unit.T, workers)
            cos_bb = self._matmul_chunked(store_b.unit, store_b.unit.T, workers)
            mask_a, mask_b = valid_a, valid_b
            excl_a, excl_b = True, True
        else:
            raise ValueError(f"unknown neighbor_mode {neighbor_mode!r}")
        self.mean_a = self._row_topk_means(cos_aa, mask_a, k, self_exclude=excl_a)
        self.mean_b = self._row_topk_means(cos_bb, mask_b, k, self_exclude=excl_b)
        denom = (self.mean_a[:, None] + self.mean_b[None, :]) / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            self.ratios = np.where(denom > 0.0, self.cos / denom, np.nan)
        self.ratios[~valid_a, :] = np.nan
        self.ratios[:, ~valid_b] = np.nan

    @staticmethod
    def _matmul_chunked(left, right, workers, chunk=512):
        out = np.empty((left.shape[0], right.shape[1]))
        spans = [(s, min(s + chunk, left.shape[0])) for s in range(0, left.shape[0], chunk)]
        if workers <= 1 or len(spans) <= 1:
            for s, e in spans:
                out[s:e] = left[s:e] @ right
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(lambda se: out.__setitem__(slice(*se), left[se[0]:se[1]] @ right), spans))
        return out

    @staticmethod
    def _row_topk_means(cos, col_mask, k, self_exclude=None):
        means = np.full(cos.shape[0], np.nan)
        for i in range(cos.shape[0]):
            row = cos[i]
            keep = col_mask.copy()
            if self_exclude and i < keep.size:
                keep[i] = False
            vals = row[keep]
            if vals.size == 0:
                continue
            kk = min(k, vals.size)
            means[i] = np.partition(vals, vals.size - kk)[vals.size - kk:].mean()
        return means

    def _reduce_rows(self, reducer):
        """Per-A-id reduction over usable B columns.

        Degenerate B columns are dropped from the pool; a row is skipped when
        it is itself degenerate or any usable pair has a non-positive
        denominator (the reduction would be ill-defined).
        """
        out = {}
        skipped = []
        cols = np.nonzero(self.valid_b)[0]
        for i, sid in enumerate(self.a.ids):
            if not self.valid_a[i] or cols.size == 0:
                skipped.append(sid)
                continue
            vals = self.ratios[i, cols]
            if np.isnan(vals).any():
                skipped.append(sid)
                continue
            out[sid] = float(reducer(vals))
        return out, skipped

    def min_over_b(self):
        """id in A -> min ratio over B (literal distance-to-labeled)."""
        return self._reduce_rows(np.min)

    def max_over_b(self):
        """id in A -> max ratio over any B member (nearest similarity)."""
        return self._reduce_rows(np.max)

    def argmax_over_b(self, a_id):
        """Best B id for one A id, ties by ascending B id."""
        row = self.ratios[self.a.row[a_id]]
        best = None
        for j, b_id in enumerate(self.b.ids):
            v = row[j]
            if not np.isfinite(v):
                continue
            if best is None or v > best[0] or (v == best[0] and b_id < best[1]):
                best = (float(v), b_id)
        if best is None:
            raise DegenerateNeighborhoodError(f"no usable retrieval target for id {a_id}")
        return best[1], best[0]
