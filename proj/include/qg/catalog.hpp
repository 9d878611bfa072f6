#ifndef QG_CATALOG_HPP
#define QG_CATALOG_HPP

#include <string>
#include <vector>

#include "qg/graph.hpp"

namespace qg {

/// Builds one of the named example graphs.
///
///   star         params {l, N}: one finite edge of length l, N leads at the center
///   interval_Gnn params {l, N, N'}: edge [v,v'] with N leads at v, N' at v'
///   Y            params {l, L}: two finite edges and one lead at the center
///   circular     params {N_1,..,N_p}: circle with p marked vertices, N_i leads
///                each; arc lengths from `lengths` (default all 1)
///   tetrahedron / cube / petersen / dodecahedron
///                params = lead counts per vertex in catalog order, padded
///                with zeros (default: one lead at the first vertex); edge
///                lengths from `lengths` (size 1 = uniform, default 1)
///
/// Throws ValidationError on an unknown name or wrong parameter arity.
MetricGraph catalog(const std::string& name,
                    const std::vector<double>& params = {},
                    const std::vector<double>& lengths = {});

/// All catalog names, for iteration in tests.
const std::vector<std::string>& catalog_names();

} // namespace qg

#endif
