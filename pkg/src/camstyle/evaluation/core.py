"""Cross-camera retrieval evaluation: distances, protocol filtering, CMC and mAP.

Single-query protocol: gallery items sharing both identity and camera with the
query are junk (excluded from ranking, consuming no rank positions), as are
distractor/junk-flagged items. Queries with no remaining cross-camera match
are excluded from every average. Ties in distance are broken by stable
gallery index.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from camstyle.evaluation import kernels


@dataclass(frozen=True)
class RankingEvaluation:
    """Per-query APs/first-match ranks plus the aggregated CMC curve and mAP."""

    per_query: tuple[tuple[float, int], ...]
    valid_mask: np.ndarray
    cmc: np.ndarray
    mean_ap: float
    num_valid_queries: int

    def rank(self, k: int) -> float:
        """CMC accuracy at rank k (1-indexed)."""
        if not 1 <= k <= self.cmc.size:
            raise ValueError(f"rank {k} outside computed curve 1..{self.cmc.size}")
        return float(self.cmc[k - 1])

    def metrics(self, ks: Sequence[int]) -> dict[str, float]:
        out = {f"rank-{k}": self.rank(k) for k in ks}
        out["mAP"] = self.mean_ap
        return out


def distance_matrix(query_feats: np.ndarray, gallery_feats: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances, queries in rows."""
    q = np.asarray(query_feats, dtype=np.float64)
    g = np.asarray(gallery_feats, dtype=np.float64)
    if q.ndim != 2 or g.ndim != 2:
        raise ValueError("feature matrices must be 2-D (items x dims)")
    if q.shape[1] != g.shape[1]:
        raise ValueError(f"feature dimension mismatch: {q.shape[1]} vs {g.shape[1]}")
    return cdist(q, g, metric="euclidean")


def protocol_filter(query_identity: int, query_camera: int,
                    gallery_identities: np.ndarray, gallery_cameras: np.ndarray,
                    gallery_junk: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(valid mask, junk mask) over gallery items for one query.

    Junk: same identity AND same camera as the query, or a junk-flagged
    (distractor) item. Everything else is valid.
    """
    gid = np.asarray(gallery_identities)
    gcam = np.asarray(gallery_cameras)
    junk = (gid == query_identity) & (gcam == query_camera)
    if gallery_junk is not None:
        junk = junk | np.asarray(gallery_junk, dtype=bool)
    return ~junk, junk


def evaluate(dist: np.ndarray, query_ids: Sequence[int], query_cams: Sequence[int],
             gallery_ids: Sequence[int], gallery_cams: Sequence[int],
             gallery_junk: Sequence[bool] | None = None,
             ks: Sequence[int] = (1, 5, 10), impl: str | None = None) -> RankingEvaluation:
    """Rank every query against the junk-filtered gallery; aggregate CMC/mAP.

    AP is the mean, over relevant rank positions r, of (relevant in top-r)/r.
    CMC(k) is the fraction of valid queries whose first match lands in the
    top k. The CMC curve is computed for k = 1..max(ks); positions past the
    kept-gallery length keep the last attained value.
    """
    dist = np.asarray(dist, dtype=np.float64)
    q_ids = np.asarray(query_ids, dtype=np.int64)
    q_cams = np.asarray(query_cams, dtype=np.int64)
    g_ids = np.asarray(gallery_ids, dtype=np.int64)
    g_cams = np.asarray(gallery_cams, dtype=np.int64)
    if dist.ndim != 2 or dist.shape != (q_ids.size, g_ids.size):
        raise ValueError(
            f"distance matrix shape {dist.shape} does not match "
            f"{q_ids.size} queries x {g_ids.size} gallery items")
    if q_cams.size != q_ids.size or g_cams.size != g_ids.size:
        raise ValueError("identity/camera metadata lengths disagree")
    junk = (np.zeros(g_ids.size, dtype=np.uint8) if gallery_junk is None
            else np.asarray(gallery_junk, dtype=np.uint8))

    order = np.argsort(dist, axis=1, kind="stable").astype(np.int64)
    kernel = kernels.get_kernel(impl)
    ap, first_rank, valid = kernel(np.ascontiguousarray(order), q_ids, q_cams,
                                   g_ids, g_cams, junk)
    valid = np.asarray(valid, dtype=bool)

    num_valid = int(valid.sum())
    if num_valid == 0:
        raise ValueError("no valid queries (every query lacks a cross-camera match)")

    max_k = max(ks)
    fr = first_rank[valid]
    cmc = np.array([(fr <= k).mean() for k in range(1, max_k + 1)], dtype=np.float64)
    mean_ap = float(ap[valid].mean())
    per_query = tuple((float(a), int(r)) for a, r, v in zip(ap, first_rank, valid) if v)
    return RankingEvaluation(per_query=per_query, valid_mask=valid, cmc=cmc,
                             mean_ap=mean_ap, num_valid_queries=num_valid)


def write_report(evaluation: RankingEvaluation, ks: Sequence[int], path: Path | str,
                 per_query_path: Path | str | None = None) -> Path:
    """Emit the metric-name -> value report (and optionally a per-query table)."""
    path = Path(path)
    lines = [f"{name}\t{value:.6f}" for name, value in evaluation.metrics(ks).items()]
    lines.append(f"num_valid_queries\t{evaluation.num_valid_queries}")
    path.write_text("\n".join(lines) + "\n")
    if per_query_path is not None:
        rows = [f"{i}\t{a:.10f}\t{r}" for i, (a, r) in enumerate(evaluation.per_query)]
        Path(per_query_path).write_text("\n".join(rows) + ("\n" if rows else ""))
    return path
