#include "qg/secular_poly.hpp"

#include <bit>
#include <map>
#include <vector>

namespace qg {

SecularPolynomial symbolic_secular(const MetricGraph& g) {
    const int n = g.num_edges();
    if (n > 8)
        throw ValidationError("symbolic secular polynomial limited to 8 edges");
    const int m = 2 * n;

    std::vector<int> origin(m), term(m);
    for (int e = 0; e < n; ++e) {
        origin[e] = g.edge(e).from;
        term[e] = g.edge(e).to;
        origin[n + e] = g.edge(e).to;
        term[n + e] = g.edge(e).from;
    }
    auto rev = [n](int b) { return b < n ? b + n : b - n; };
    std::vector<int> deg(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v)
        deg[v] = g.edge_degree(v) + g.lead_count(v);

    // entries of Id - U (z)_2; column c carries the variable of edge c % n
    auto entry = [&](int r, int c) {
        MultiPoly p(n);
        if (r == c) p += MultiPoly::constant(n, 1);
        if (term[c] == origin[r]) {
            Rational u = Rational(2, deg[origin[r]]) - (r == rev(c) ? 1 : 0);
            if (u != 0) {
                Monomial mo(n, 0);
                mo[c % n] = 1;
                p += MultiPoly::term(n, -u, mo);
            }
        }
        return p;
    };

    // determinant by dynamic programming over column subsets: after level r,
    // `cur[mask]` is the minor of rows [0, r] against the columns in mask
    std::map<uint32_t, MultiPoly> cur;
    cur[0] = MultiPoly::constant(n, 1);
    for (int r = 0; r < m; ++r) {
        std::vector<MultiPoly> row_entry(m);
        for (int c = 0; c < m; ++c) row_entry[c] = entry(r, c);
        std::map<uint32_t, MultiPoly> next;
        for (const auto& [mask, minor] : cur) {
            if (minor.is_zero()) continue;
            for (int c = 0; c < m; ++c) {
                if (mask & (1u << c)) continue;
                if (row_entry[c].is_zero()) continue;
                // sign from inversions against columns already used above c
                int above = std::popcount(mask >> (c + 1));
                MultiPoly contrib = row_entry[c] * minor;
                if (above & 1) contrib = contrib * Rational(-1);
                uint32_t mask2 = mask | (1u << c);
                auto it2 = next.find(mask2);
                if (it2 == next.end())
                    next.emplace(mask2, std::move(contrib));
                else
                    it2->second += contrib;
            }
        }
        cur = std::move(next);
    }

    uint32_t full = (m == 0) ? 0u : ((m == 32) ? 0xffffffffu : ((1u << m) - 1));
    MultiPoly det = MultiPoly::constant(n, 1);
    auto it = cur.find(full);
    if (it != cur.end()) det = it->second;

    SecularPolynomial out;
    out.poly = det.normalized(&out.unit);
    return out;
}

} // namespace qg
