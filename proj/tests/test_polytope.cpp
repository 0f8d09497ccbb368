#include "pcon/polytope.hpp"

#include <catch_amalgamated.hpp>

using namespace pcon;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<Halfspace> box(int dim, double lo, double hi)
{
    std::vector<Halfspace> hs;
    for (int i = 0; i < dim; ++i) {
        std::vector<double> n(dim, 0.0);
        n[i] = 1.0;
        hs.push_back({n, hi});
        n[i] = -1.0;
        hs.push_back({n, -lo});
    }
    return hs;
}

// 0 <= x_1 <= ... <= x_dim <= 1
std::vector<Halfspace> ordered_simplex(int dim)
{
    std::vector<Halfspace> hs;
    std::vector<double> n(dim, 0.0);
    n[0] = -1.0;
    hs.push_back({n, 0.0});
    for (int i = 0; i + 1 < dim; ++i) {
        std::vector<double> m(dim, 0.0);
        m[i] = 1.0;
        m[i + 1] = -1.0;
        hs.push_back({m, 0.0});
    }
    std::vector<double> top(dim, 0.0);
    top[dim - 1] = 1.0;
    hs.push_back({top, 1.0});
    return hs;
}

}  // namespace

TEST_CASE("boxes have product volume", "[polytope]")
{
    CHECK_THAT(polytope_volume(box(2, 0.0, 2.0), 2).volume, WithinAbs(4.0, 1e-12));
    CHECK_THAT(polytope_volume(box(3, -1.0, 0.5), 3).volume, WithinAbs(3.375, 1e-12));
    CHECK_THAT(polytope_volume(box(4, 0.0, 1.0), 4).volume, WithinAbs(1.0, 1e-12));
    CHECK(enumerate_vertices(box(3, 0.0, 1.0), 3).size() == 8);
}

TEST_CASE("ordered simplices have volume 1/d!", "[polytope]")
{
    CHECK_THAT(polytope_volume(ordered_simplex(2), 2).volume, WithinAbs(1.0 / 2, 1e-12));
    CHECK_THAT(polytope_volume(ordered_simplex(3), 3).volume, WithinAbs(1.0 / 6, 1e-12));
    CHECK_THAT(polytope_volume(ordered_simplex(4), 4).volume, WithinAbs(1.0 / 24, 1e-12));
}

TEST_CASE("a cube cut by a diagonal plane keeps half its volume", "[polytope]")
{
    auto hs = box(3, 0.0, 1.0);
    hs.push_back({{1.0, 1.0, 1.0}, 1.5});
    CHECK_THAT(polytope_volume(hs, 3).volume, WithinAbs(0.5, 1e-12));
}

TEST_CASE("empty and flat polytopes are reported", "[polytope]")
{
    auto empty = box(3, 0.0, 1.0);
    empty.push_back({{1.0, 0.0, 0.0}, -0.5});
    const auto e = polytope_volume(empty, 3);
    CHECK(e.status == PolytopeStatus::Empty);
    CHECK(e.volume == 0.0);

    auto flat = box(3, 0.0, 1.0);
    flat.push_back({{0.0, 0.0, 1.0}, 0.0});
    const auto f = polytope_volume(flat, 3);
    CHECK(f.status == PolytopeStatus::Degenerate);
    CHECK(f.volume == 0.0);
}
