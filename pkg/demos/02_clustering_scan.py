"""Embed the fixture vocabulary, scan k, and inspect the clusters.

Shows why the pipeline defaults to k=8 components / k=6 elements on the
bundled vocabulary: the scan report is evidence, never an auto-selector.
"""

from designmine.clustering import kmeans, scan_k
from designmine.demo_fixtures import UI_FAMILIES, VE_FAMILIES
from designmine.embedding import HashEmbedder, embed_terms

embedder = HashEmbedder()

for label, families, k in (("UI components", UI_FAMILIES, 8), ("visual elements", VE_FAMILIES, 6)):
    terms = sorted(t for members in families.values() for t in members)
    matrix = embed_terms(terms, embedder)
    print(f"== {label}: {len(terms)} terms, {matrix.shape[1]} dims ==")

    rows = scan_k(matrix, (3, 10), seed=0)
    print("   k  inertia    silhouette")
    for row in rows:
        marker = " <- configured" if row.k == k else ""
        print(f"  {row.k:2d}  {row.inertia:9.4f}  {row.silhouette:9.4f}{marker}")

    best = None
    for seed in range(10):
        result = kmeans(matrix, k, seed=seed)
        if best is None or result.inertia < best.inertia:
            best = result
    members: dict[int, list[str]] = {}
    for term, cid in zip(terms, best.assignments):
        members.setdefault(int(cid), []).append(term)
    print(f"  clusters at k={k} (best of 10 restarts):")
    for cid in sorted(members):
        print(f"    #{cid}: {', '.join(members[cid])}")
    print()
