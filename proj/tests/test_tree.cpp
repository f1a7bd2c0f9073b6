#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "efg/tree.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace efg;

namespace {

// node counts straight from the closed forms and the recurrence
long long expected_size(Role role, int s, int m) {
    if (s == 1) {
        long long mm = m;
        return role == Role::T1 ? 1 + (mm + 1) * (mm + 1) : 1 + (mm + 1) + mm * mm;
    }
    return role == Role::T1 ? 1 + (m + 1) * expected_size(Role::T2, s - 1, m)
                            : 1 + m * expected_size(Role::T2, s - 1, m) +
                                  expected_size(Role::T1, s - 1, m);
}

} // namespace

TEST_CASE("construction node counts match the recurrence") {
    CHECK(build_construction(Role::T1, 1, 1, 1).size() == 5);
    CHECK(build_construction(Role::T2, 1, 1, 1).size() == 4);
    CHECK(build_construction(Role::T2, 2, 1, 2).size() == 27);

    for (int s = 1; s <= 3; ++s)
        for (int k = 1; k <= 2; ++k)
            for (int m : {s * k, s * k + 1}) {
                CAPTURE(s);
                CAPTURE(k);
                CAPTURE(m);
                Tree t1 = build_construction(Role::T1, s, k, m);
                Tree t2 = build_construction(Role::T2, s, k, m);
                CHECK(t1.size() == expected_size(Role::T1, s, m));
                CHECK(t2.size() == expected_size(Role::T2, s, m));
                CHECK(construction_size(Role::T1, s, m) == t1.size());
                CHECK(construction_size(Role::T2, s, m) == t2.size());
                REQUIRE(t1.blueprint().has_value());
                CHECK(t1.blueprint()->m == m);
                CHECK(static_cast<int>(t1.children(t1.root()).size()) == m + 1);
                CHECK(static_cast<int>(t2.children(t2.root()).size()) == m + 1);
            }
}

TEST_CASE("construction rejects bad parameters") {
    CHECK_THROWS_AS(build_construction(Role::T1, 2, 1, 1), ParameterError);
    CHECK_THROWS_AS(build_construction(Role::T1, 0, 1, 1), ParameterError);
    CHECK_THROWS_AS(build_construction(Role::T2, 1, 0, 1), ParameterError);
    CHECK_THROWS_AS(build_construction(Role::T2, 3, 2, 5), ParameterError);
}

TEST_CASE("canonical codes") {
    Tree leaf = Tree::from_parents({std::nullopt});
    CHECK(canonical_code(leaf, 0) == "()");

    Tree star2 = Tree::from_parents({std::nullopt, 0, 0});
    CHECK(canonical_code(star2, 0) == "(()())");

    Tree t1 = build_construction(Role::T1, 1, 1, 1);
    Tree t2 = build_construction(Role::T2, 1, 1, 1);
    CHECK(canonical_code(t1, t1.root()) != canonical_code(t2, t2.root()));

    // code equality must be insensitive to labels
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        Tree t = test::random_tree(rng, 2 + static_cast<int>(rng() % 14));
        Tree copy = test::relabeled_copy(rng, t);
        CHECK(canonical_code(t, 0) == canonical_code(copy, 0));
    }
}

TEST_CASE("top-level subtree codes: first family tree uniform, second has one odd child") {
    for (int s = 1; s <= 3; ++s)
        for (int k = 1; k <= 2; ++k) {
            const int m = s * k;
            Tree t1 = build_construction(Role::T1, s, k, m);
            Tree t2 = build_construction(Role::T2, s, k, m);
            CanonicalTable c1(t1), c2(t2);
            const auto& u = t1.children(t1.root());
            for (size_t i = 1; i < u.size(); ++i) CHECK(c1.code(u[i]) == c1.code(u[0]));
            const auto& v = t2.children(t2.root());
            for (size_t i = 1; i + 1 < v.size(); ++i) CHECK(c2.code(v[i]) == c2.code(v[0]));
            CHECK(c2.code(v.back()) != c2.code(v[0]));
        }
}

TEST_CASE("construction isomorphism: family claims") {
    // single nodes
    Tree leaf = Tree::from_parents({std::nullopt});
    IsoMap triv = construction_isomorphism(leaf, 0, leaf, 0);
    CHECK(triv.apply(0) == 0);

    // each top-level subtree of the level-(s+1) first tree is a copy of the
    // level-s second tree, and matches every non-distinguished top-level
    // subtree across the pair
    const int s = 1, k = 1, m = 2;
    Tree t1 = build_construction(Role::T1, s + 1, k, m);
    Tree t2 = build_construction(Role::T2, s + 1, k, m);
    Tree inner = build_construction(Role::T2, s, k, m);
    for (NodeId u : t1.children(t1.root())) {
        IsoMap iso = construction_isomorphism(t1, u, inner, inner.root());
        CHECK(iso.apply(u) == inner.root());
    }
    const auto& v = t2.children(t2.root());
    for (NodeId u : t1.children(t1.root()))
        for (size_t j = 0; j + 1 < v.size(); ++j)
            CHECK_NOTHROW(construction_isomorphism(t1, u, t2, v[j]));

    // size mismatch
    Tree path2 = Tree::from_parents({std::nullopt, 0});
    CHECK_THROWS_AS(construction_isomorphism(leaf, 0, path2, 0), NotIsomorphicError);
}

TEST_CASE("isomorphisms preserve parents edge by edge and are deterministic") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Tree t = test::random_tree(rng, 2 + static_cast<int>(rng() % 20));
        Tree copy = test::relabeled_copy(rng, t);
        IsoMap iso = construction_isomorphism(t, 0, copy, 0);
        REQUIRE(iso.forward.size() == static_cast<size_t>(t.size()));
        for (NodeId vtx = 1; vtx < t.size(); ++vtx) {
            NodeId mapped = iso.apply(vtx);
            CHECK(copy.parent(mapped).value() == iso.apply(*t.parent(vtx)));
        }
        // repeated calls give the same map, and the reversed call its inverse
        IsoMap again = construction_isomorphism(t, 0, copy, 0);
        CHECK(again.forward == iso.forward);
        IsoMap rev = construction_isomorphism(copy, 0, t, 0);
        CHECK(rev.forward == iso.backward);
    }
}

TEST_CASE("json serialization round-trips, dot exports edges") {
    Tree leaf = Tree::from_parents({std::nullopt});
    auto j = nlohmann::json::parse(serialize(leaf, TreeFormat::Json));
    CHECK(j["root"] == 0);
    REQUIRE(j["nodes"].size() == 1);
    CHECK(j["nodes"][0]["id"] == 0);
    CHECK(j["nodes"][0]["parent"].is_null());

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        Tree t = test::random_tree(rng, 1 + static_cast<int>(rng() % 18));
        Tree back = deserialize(serialize(t, TreeFormat::Json));
        REQUIRE(back.size() == t.size());
        for (NodeId vtx = 0; vtx < t.size(); ++vtx) CHECK(back.parent(vtx) == t.parent(vtx));
    }

    Tree t2 = build_construction(Role::T2, 1, 1, 1);
    Tree back = deserialize(serialize(t2, TreeFormat::Json));
    REQUIRE(back.blueprint().has_value());
    CHECK(back.blueprint()->role == Role::T2);
    CHECK(back.blueprint()->s == 1);
    for (NodeId vtx = 0; vtx < t2.size(); ++vtx) CHECK(back.parent(vtx) == t2.parent(vtx));

    std::string dot = serialize(t2, TreeFormat::Dot);
    CHECK(dot.find("0 [shape=doublecircle]") != std::string::npos);
    CHECK(dot.find("0 -> 1") != std::string::npos);
}

TEST_CASE("deserialize rejects malformed structures") {
    // two-node cycle
    CHECK_THROWS_AS(
        deserialize(R"({"root":0,"nodes":[{"id":0,"parent":1},{"id":1,"parent":0}]})"),
        StructureError);
    // two roots
    CHECK_THROWS_AS(
        deserialize(R"({"root":0,"nodes":[{"id":0,"parent":null},{"id":1,"parent":null}]})"),
        StructureError);
    // sparse ids
    CHECK_THROWS_AS(
        deserialize(R"({"root":0,"nodes":[{"id":0,"parent":null},{"id":5,"parent":0}]})"),
        StructureError);
    // root not node 0
    CHECK_THROWS_AS(
        deserialize(R"({"root":1,"nodes":[{"id":0,"parent":1},{"id":1,"parent":null}]})"),
        StructureError);
    // not json / missing fields
    CHECK_THROWS_AS(deserialize("not json at all"), ParseError);
    CHECK_THROWS_AS(deserialize(R"({"nodes":[]})"), ParseError);
    // self loop
    CHECK_THROWS_AS(
        deserialize(R"({"root":0,"nodes":[{"id":0,"parent":null},{"id":1,"parent":1}]})"),
        StructureError);
}

TEST_CASE("subtree bookkeeping") {
    Tree t = build_construction(Role::T1, 2, 1, 2);
    NodeId u1 = t.children(t.root())[0];
    CHECK(t.in_subtree(u1, u1));
    CHECK(t.in_subtree(t.root(), u1));
    CHECK(!t.in_subtree(u1, t.root()));
    NodeId deep = t.children(t.children(u1)[0])[0];
    CHECK(t.in_subtree(u1, deep));
    CHECK(t.child_towards(t.root(), deep) == u1);
    CHECK(t.child_towards(u1, deep) == t.children(u1)[0]);
    CHECK(t.subtree_size(t.root()) == t.size());
    CHECK_THROWS_AS(t.child_towards(u1, u1), StructureError);

    REQUIRE(t.construction_tag(u1).has_value());
    CHECK(t.construction_tag(u1)->role == Role::T2);
    CHECK(t.construction_tag(u1)->s == 1);
    CHECK(!t.construction_tag(deep).has_value());
}
