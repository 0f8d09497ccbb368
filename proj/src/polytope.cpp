#include "pcon/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace pcon {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(const std::vector<double>& a)
{
    return std::sqrt(dot(a, a));
}

// Solves A x = rhs in place by Gaussian elimination with partial pivoting.
bool solve(std::vector<std::vector<double>> a, std::vector<double> rhs, std::vector<double>& x)
{
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        if (std::abs(a[piv][col]) < 1e-12) {
            return false;
        }
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) {
            s -= a[i][c] * x[c];
        }
        x[i] = s / a[i][i];
    }
    return true;
}

std::vector<Halfspace> normalized(std::span<const Halfspace> hs, bool& infeasible)
{
    std::vector<Halfspace> out;
    infeasible = false;
    for (const auto& h : hs) {
        const double len = norm(h.normal);
        if (len == 0.0) {
            if (h.bound < 0.0) {
                infeasible = true;
            }
            continue;
        }
        Halfspace u{h.normal, h.bound / len};
        for (auto& c : u.normal) {
            c /= len;
        }
        out.push_back(std::move(u));
    }
    return out;
}

// Orthonormal basis of span{p - origin : p in points}.
std::vector<std::vector<double>> affine_basis(const std::vector<const Point*>& points, double tol)
{
    std::vector<std::vector<double>> basis;
    if (points.empty()) {
        return basis;
    }
    const Point& origin = *points.front();
    for (std::size_t k = 1; k < points.size(); ++k) {
        std::vector<double> v(origin.size());
        for (std::size_t c = 0; c < v.size(); ++c) {
            v[c] = (*points[k])[c] - origin[c];
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : basis) {
                const double proj = dot(v, e);
                for (std::size_t c = 0; c < v.size(); ++c) {
                    v[c] -= proj * e[c];
                }
            }
        }
        const double len = norm(v);
        if (len > tol) {
            for (auto& c : v) {
                c /= len;
            }
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

double distance_to_hull(const Point& p, const std::vector<const Point*>& points, double tol)
{
    const auto basis = affine_basis(points, tol);
    const Point& origin = *points.front();
    std::vector<double> v(p.size());
    for (std::size_t c = 0; c < v.size(); ++c) {
        v[c] = p[c] - origin[c];
    }
    for (const auto& e : basis) {
        const double proj = dot(v, e);
        for (std::size_t c = 0; c < v.size(); ++c) {
            v[c] -= proj * e[c];
        }
    }
    return norm(v);
}

double face_measure(const std::vector<Point>& verts, const std::vector<int>& face, int k,
                    const std::vector<Halfspace>& hs, double tol)
{
    if (k == 0) {
        return 1.0;
    }
    if (k == 1) {
        double best = 0.0;
        for (std::size_t a = 0; a < face.size(); ++a) {
            for (std::size_t b = a + 1; b < face.size(); ++b) {
                std::vector<double> d(verts[face[a]].size());
                for (std::size_t c = 0; c < d.size(); ++c) {
                    d[c] = verts[face[a]][c] - verts[face[b]][c];
                }
                best = std::max(best, norm(d));
            }
        }
        return best;
    }

    Point centroid(verts[face.front()].size(), 0.0);
    for (int i : face) {
        for (std::size_t c = 0; c < centroid.size(); ++c) {
            centroid[c] += verts[i][c];
        }
    }
    for (auto& c : centroid) {
        c /= static_cast<double>(face.size());
    }

    std::set<std::vector<int>> seen;
    double total = 0.0;
    for (const auto& h : hs) {
        std::vector<int> sub;
        for (int i : face) {
            if (std::abs(dot(h.normal, verts[i]) - h.bound) <= 10.0 * tol) {
                sub.push_back(i);
            }
        }
        if (static_cast<int>(sub.size()) < k || sub.size() == face.size() || !seen.insert(sub).second) {
            continue;
        }
        std::vector<const Point*> pts;
        for (int i : sub) {
            pts.push_back(&verts[i]);
        }
        if (static_cast<int>(affine_basis(pts, tol).size()) != k - 1) {
            continue;
        }
        const double height = distance_to_hull(centroid, pts, tol);
        total += height * face_measure(verts, sub, k - 1, hs, tol) / k;
    }
    return total;
}

}  // namespace

std::vector<Point> enumerate_vertices(std::span<const Halfspace> halfspaces, int dim, double tol)
{
    bool infeasible = false;
    const auto hs = normalized(halfspaces, infeasible);
    std::vector<Point> verts;
    if (infeasible || static_cast<int>(hs.size()) < dim) {
        return verts;
    }

    std::vector<int> pick(dim);
    std::iota(pick.begin(), pick.end(), 0);
    const int m = static_cast<int>(hs.size());
    for (;;) {
        std::vector<std::vector<double>> a(dim);
        std::vector<double> rhs(dim);
        for (int r = 0; r < dim; ++r) {
            a[r] = hs[pick[r]].normal;
            rhs[r] = hs[pick[r]].bound;
        }
        Point x;
        if (solve(a, rhs, x)) {
            const bool feasible = std::all_of(hs.begin(), hs.end(), [&](const Halfspace& h) {
                return dot(h.normal, x) <= h.bound + tol;
            });
            const bool fresh = std::none_of(verts.begin(), verts.end(), [&](const Point& v) {
                for (int c = 0; c < dim; ++c) {
                    if (std::abs(v[c] - x[c]) > 10.0 * tol) {
                        return false;
                    }
                }
                return true;
            });
            if (feasible && fresh) {
                verts.push_back(std::move(x));
            }
        }

        // Next combination in lexicographic order.
        int i = dim - 1;
        while (i >= 0 && pick[i] == m - dim + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++pick[i];
        for (int j = i + 1; j < dim; ++j) {
            pick[j] = pick[j - 1] + 1;
        }
    }
    return verts;
}

int affine_dimension(std::span<const Point> points, double tol)
{
    std::vector<const Point*> pts;
    for (const auto& p : points) {
        pts.push_back(&p);
    }
    return static_cast<int>(affine_basis(pts, tol).size());
}

PolytopeVolume polytope_volume(std::span<const Halfspace> halfspaces, int dim, double tol)
{
    PolytopeVolume out;
    const auto verts = enumerate_vertices(halfspaces, dim, tol);
    out.vertex_count = verts.size();
    if (verts.empty()) {
        out.status = PolytopeStatus::Empty;
        return out;
    }
    if (affine_dimension(verts, 1e3 * tol) < dim) {
        out.status = PolytopeStatus::Degenerate;
        return out;
    }
    bool infeasible = false;
    const auto hs = normalized(halfspaces, infeasible);
    std::vector<int> all(verts.size());
    std::iota(all.begin(), all.end(), 0);
    out.volume = face_measure(verts, all, dim, hs, tol);
    out.status = PolytopeStatus::Ok;
    return out;
}

}  // namespace pcon
