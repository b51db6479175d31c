import pytest
from hypothesis import given, settings, strategies as st

from designmine.errors import (
    ConfigurationError,
    NotFoundError,
    UnknownClusterError,
    UnmappedTermError,
)
from designmine.index import (
    FacetQuery,
    KnowledgeIndex,
    PostKnowledgeStats,
    ScoringConfig,
    compute_stats,
    score,
)
from designmine.taxonomy import UI_KIND, VE_KIND

from conftest import build_fixture_corpus, simple_comment, simple_post, structure_all


def brute_force_stats(post_id, structured_list, taxonomy):
    """Independent recount: walk raw mentions one by one."""
    num_ui, num_ve, pairs = {}, {}, {}
    for sc in structured_list:
        ui_clusters, ve_clusters = set(), set()
        for m in sc.mentions:
            cid = taxonomy.cluster_id(m.kind, m.canonical)
            if m.kind == UI_KIND:
                num_ui[cid] = num_ui.get(cid, 0) + 1
                ui_clusters.add(cid)
            else:
                num_ve[cid] = num_ve.get(cid, 0) + 1
                ve_clusters.add(cid)
        for c in ui_clusters:
            for e in ve_clusters:
                pairs[(c, e)] = pairs.get((c, e), 0) + 1
    return num_ui, num_ve, pairs


def ten_post_corpus():
    """10 posts with varied mention mixes, for the recount oracle."""
    bodies_by_post = {
        "p0": ["the home button is grey"],
        "p1": ["gradient on the sidebar", "white icon"],
        "p2": ["photo with padding", "menu font, card alignment"],
        "p3": ["nothing relevant"],
        "p4": ["grey grey button", "white button, square image"],
        "p5": ["icon icon icon"],
        "p6": ["paragraph contrast", "sidebar layout"],
        "p7": ["button color", "gradient photo", "grey card"],
        "p8": ["white white white"],
        "p9": ["settings button with gradient", "home button in grey"],
    }
    pairs = []
    for i, (pid, bodies) in enumerate(sorted(bodies_by_post.items())):
        post = simple_post(pid, created=1000 + i)
        comments = [
            simple_comment(f"{pid}c{j}", pid, body, created=2000 + j)
            for j, body in enumerate(bodies)
        ]
        pairs.append((post, comments))
    return build_fixture_corpus(pairs)


# -- compute_stats -----------------------------------------------------------


def test_stats_hand_count(provider, taxonomy):
    corpus = build_fixture_corpus(
        [(simple_post("p1"), [simple_comment("c1", "p1", "the home button is grey")])]
    )
    structured = structure_all(corpus, provider)
    stats = compute_stats("p1", structured.values(), taxonomy)
    button = taxonomy.cluster_by_name(UI_KIND, "Button").id
    color = taxonomy.cluster_by_name(VE_KIND, "Color").id
    assert stats.num_ui(button) == 1
    assert stats.num_ve(color) == 1
    assert stats.pair_counts == {(button, color): 1}


def test_stats_mention_level_counting(provider, taxonomy):
    # "grey grey button": two grey mentions count twice at stat level.
    corpus = build_fixture_corpus(
        [(simple_post("p1"), [simple_comment("c1", "p1", "grey grey button")])]
    )
    stats = compute_stats("p1", structure_all(corpus, provider).values(), taxonomy)
    color = taxonomy.cluster_by_name(VE_KIND, "Color").id
    button = taxonomy.cluster_by_name(UI_KIND, "Button").id
    assert stats.num_ve(color) == 2
    assert stats.pair_counts[(button, color)] == 1  # pairs dedup per comment


def test_stats_all_zero(provider, taxonomy):
    corpus = build_fixture_corpus(
        [(simple_post("p1"), [simple_comment("c1", "p1", "no keywords at all")])]
    )
    stats = compute_stats("p1", structure_all(corpus, provider).values(), taxonomy)
    assert stats.num_ui_by_cluster == {}
    assert stats.num_ve_by_cluster == {}
    assert stats.pair_counts == {}


def test_stats_equal_brute_force_on_ten_posts(provider, taxonomy):
    corpus = ten_post_corpus()
    structured = structure_all(corpus, provider)
    for pid in corpus.posts:
        scs = [structured[cid] for cid in corpus.comments_by_post[pid]]
        stats = compute_stats(pid, scs, taxonomy)
        num_ui, num_ve, pairs = brute_force_stats(pid, scs, taxonomy)
        assert stats.num_ui_by_cluster == num_ui
        assert stats.num_ve_by_cluster == num_ve
        assert stats.pair_counts == pairs


def test_stats_unmapped_term_errors(provider):
    from conftest import make_taxonomy

    taxonomy = make_taxonomy()
    taxonomy.term_to_cluster.pop((UI_KIND, "icon"))
    corpus = build_fixture_corpus(
        [(simple_post("p1"), [simple_comment("c1", "p1", "an icon")])]
    )
    with pytest.raises(UnmappedTermError):
        compute_stats("p1", structure_all(corpus, provider).values(), taxonomy)


# -- score ----------------------------------------------------------------------


def test_score_formula():
    stats = PostKnowledgeStats("p", {0: 2}, {0: 3}, {})
    assert score(stats, 0, 0, ScoringConfig()) == pytest.approx(2.6, abs=1e-12)


def test_score_zero():
    stats = PostKnowledgeStats("p", {}, {}, {})
    assert score(stats, 0, 0, ScoringConfig()) == 0.0


def test_score_degenerate_weights():
    stats = PostKnowledgeStats("p", {0: 7}, {0: 3}, {})
    assert score(stats, 0, 0, ScoringConfig(w_ui=1.0, w_ve=0.0)) == 7.0


def test_bad_weights_rejected():
    with pytest.raises(ConfigurationError):
        ScoringConfig(w_ui=-0.1)
    with pytest.raises(ConfigurationError):
        ScoringConfig(w_ui=0.0, w_ve=0.0)


@given(
    num_ui=st.integers(0, 1000),
    num_ve=st.integers(0, 1000),
    lam=st.floats(0.01, 100.0, allow_nan=False),
)
@settings(max_examples=200)
def test_score_scale_covariance(num_ui, num_ve, lam):
    stats = PostKnowledgeStats("p", {0: num_ui}, {0: num_ve}, {})
    base = score(stats, 0, 0, ScoringConfig(0.4, 0.6))
    scaled = score(stats, 0, 0, ScoringConfig(0.4 * lam, 0.6 * lam))
    assert scaled == pytest.approx(lam * base, rel=1e-9)


# -- index queries ----------------------------------------------------------------


@pytest.fixture()
def index(provider, taxonomy):
    corpus = ten_post_corpus()
    structured = structure_all(corpus, provider)
    return KnowledgeIndex(corpus, structured, taxonomy)


def test_sort_posts_by_score(index):
    order = index.sort_posts(FacetQuery(ui_cluster="Button", ve_cluster="Color"))
    stats = index.stats
    button = index.resolve_cluster(UI_KIND, "Button")
    color = index.resolve_cluster(VE_KIND, "Color")

    def s(pid):
        return 0.4 * stats[pid].num_ui(button) + 0.6 * stats[pid].num_ve(color)

    scores = [s(pid) for pid in order]
    assert scores == sorted(scores, reverse=True)
    # hand check the top: p4 has 2 button mentions + 3 color mentions = 2.6
    assert order[0] == "p4"


def test_sort_posts_ui_only(index):
    order = index.sort_posts(FacetQuery(ui_cluster="Icon"))
    icon = index.resolve_cluster(UI_KIND, "Icon")
    counts = [index.stats[pid].num_ui(icon) for pid in order]
    assert counts == sorted(counts, reverse=True)
    assert order[0] == "p5"  # three icon mentions


def test_sort_posts_no_facets_newest_first(index):
    order = index.sort_posts(FacetQuery())
    created = [index.corpus.posts[pid].created_at for pid in order]
    assert created == sorted(created, reverse=True)


def test_sort_posts_tie_breaks(provider, taxonomy):
    # Same score, different created_at: newer first; same created_at: id asc.
    posts = [
        (simple_post("pa", created=100), [simple_comment("ca", "pa", "grey button")]),
        (simple_post("pb", created=300), [simple_comment("cb", "pb", "grey button")]),
        (simple_post("pc", created=300), [simple_comment("cc", "pc", "grey button")]),
    ]
    corpus = build_fixture_corpus(posts)
    index = KnowledgeIndex(corpus, structure_all(corpus, provider), taxonomy)
    order = index.sort_posts(FacetQuery(ui_cluster="Button", ve_cluster="Color"))
    assert order == ["pb", "pc", "pa"]


def test_sort_posts_unknown_cluster(index):
    with pytest.raises(UnknownClusterError):
        index.sort_posts(FacetQuery(ui_cluster="Knob"))


def test_monotonicity_in_ve_count(provider, taxonomy):
    # Adding one more color mention to a post never lowers its rank.
    base_posts = [
        (simple_post("pa", created=100), [simple_comment("ca", "pa", "grey button")]),
        (simple_post("pb", created=100), [simple_comment("cb", "pb", "grey grey button")]),
    ]
    corpus = build_fixture_corpus(base_posts)
    index = KnowledgeIndex(corpus, structure_all(corpus, provider), taxonomy)
    query = FacetQuery(ui_cluster="Button", ve_cluster="Color")
    before = index.sort_posts(query).index("pa")

    boosted = [
        (simple_post("pa", created=100), [simple_comment("ca", "pa", "grey grey grey button")]),
        base_posts[1],
    ]
    corpus2 = build_fixture_corpus(boosted)
    index2 = KnowledgeIndex(corpus2, structure_all(corpus2, provider), taxonomy)
    after = index2.sort_posts(query).index("pa")
    assert after <= before


# -- sort_comments -----------------------------------------------------------------


def test_sort_comments_by_mention_count(provider, taxonomy):
    comments = [
        simple_comment("c1", "p1", "grey grey grey sidebar", created=100),
        simple_comment("c2", "p1", "white once", created=200),
        simple_comment("c3", "p1", "no colors here", created=300),
    ]
    corpus = build_fixture_corpus([(simple_post("p1"), comments)])
    index = KnowledgeIndex(corpus, structure_all(corpus, provider), taxonomy)
    views = index.sort_comments("p1", ve_cluster="Color")
    assert [v.comment_id for v in views] == ["c1", "c2", "c3"]
    assert [v.mention_count for v in views] == [3, 1, 0]


def test_sort_comments_tie_by_created_at_ascending(provider, taxonomy):
    comments = [
        simple_comment("c_new", "p1", "grey", created=900),
        simple_comment("c_old", "p1", "white", created=100),
    ]
    corpus = build_fixture_corpus([(simple_post("p1"), comments)])
    index = KnowledgeIndex(corpus, structure_all(corpus, provider), taxonomy)
    views = index.sort_comments("p1", ve_cluster="Color")
    assert [v.comment_id for v in views] == ["c_old", "c_new"]


def test_sort_comments_default_order_no_highlights(provider, taxonomy):
    comments = [
        simple_comment("c2", "p1", "grey and white", created=200),
        simple_comment("c1", "p1", "gradient", created=100),
    ]
    corpus = build_fixture_corpus([(simple_post("p1"), comments)])
    index = KnowledgeIndex(corpus, structure_all(corpus, provider), taxonomy)
    views = index.sort_comments("p1")
    assert [v.comment_id for v in views] == ["c1", "c2"]
    assert all(v.keyword_spans == [] for v in views)


def test_sort_comments_feedback_flags(provider, taxonomy):
    body = "Make the button bigger. The grey is too dull. It works because grey is calm."
    corpus = build_fixture_corpus([(simple_post("p1"), [simple_comment("c1", "p1", body)])])
    index = KnowledgeIndex(corpus, structure_all(corpus, provider), taxonomy)
    views = index.sort_comments("p1", feedback_type="suggestion")
    labels = [(s.label, s.highlighted) for s in views[0].sentences]
    assert labels == [("suggestion", True), ("critique", False), ("rationale", False)]


def test_sort_comments_spans_validate(provider, taxonomy):
    body = "Très grey: the home button é clutters."
    corpus = build_fixture_corpus([(simple_post("p1"), [simple_comment("c1", "p1", body)])])
    index = KnowledgeIndex(corpus, structure_all(corpus, provider), taxonomy)
    views = index.sort_comments("p1", ve_cluster="Color", feedback_type="critique")
    view = views[0]
    data = view.body.encode("utf-8")
    for span in view.keyword_spans:
        assert data[span.start : span.end].decode("utf-8").lower() == span.canonical
    for s in view.sentences:
        assert 0 <= s.start < s.end <= len(data)
        data[s.start : s.end].decode("utf-8")


def test_sort_comments_unknown_post(index):
    with pytest.raises(NotFoundError):
        index.sort_comments("nope")


# -- recommend ----------------------------------------------------------------------


def test_recommend_exhaustion(index):
    # Only p0, p4, p7, p9 have Button+Color; excluding current p0 leaves 3.
    got = index.recommend("p0", ui_cluster="Button", ve_cluster="Color", n=5, seed=1)
    assert sorted(got) == ["p4", "p7", "p9"]


def test_recommend_excludes_current(index):
    got = index.recommend("p4", ui_cluster="Button", ve_cluster="Color", n=10, seed=0)
    assert "p4" not in got


def test_recommend_deterministic(index):
    a = index.recommend("p0", ui_cluster="Button", ve_cluster="Color", n=2, seed=9)
    b = index.recommend("p0", ui_cluster="Button", ve_cluster="Color", n=2, seed=9)
    assert a == b


def test_recommend_soundness(index):
    button = index.resolve_cluster(UI_KIND, "Button")
    color = index.resolve_cluster(VE_KIND, "Color")
    got = index.recommend("p0", ui_cluster="Button", ve_cluster="Color", n=3, seed=4)
    for pid in got:
        assert index.stats[pid].num_ui(button) >= 1
        assert index.stats[pid].num_ve(color) >= 1


def test_recommend_validates_inputs(index):
    with pytest.raises(NotFoundError):
        index.recommend("ghost", n=1)
    with pytest.raises(ConfigurationError):
        index.recommend("p0", n=0)


# -- argsort invariance ----------------------------------------------------------------


@given(lam=st.floats(0.01, 50.0, allow_nan=False))
@settings(max_examples=50, deadline=None)
def test_sort_posts_scale_invariant(lam):
    from designmine.structuring import Gazetteer, LexiconProvider

    from conftest import GAZETTEER_LINES, make_taxonomy

    provider = LexiconProvider(Gazetteer.from_lines(GAZETTEER_LINES))
    taxonomy = make_taxonomy()
    corpus = ten_post_corpus()
    structured = structure_all(corpus, provider)
    base = KnowledgeIndex(corpus, structured, taxonomy, scoring=ScoringConfig(0.4, 0.6))
    scaled = KnowledgeIndex(
        corpus, structured, taxonomy, scoring=ScoringConfig(0.4 * lam, 0.6 * lam)
    )
    query = FacetQuery(ui_cluster="Button", ve_cluster="Color")
    assert base.sort_posts(query) == scaled.sort_posts(query)
