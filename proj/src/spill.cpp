#include "ionet/spill.hpp"

#include "ionet/errors.hpp"

namespace ionet::spill {

LinkMatrix threshold_links(const net::ShareMatrix& sm, double theta) {
    if (!(theta > 0.0) || theta > 1.0)
        throw config_error("ThetaOutOfRange", "theta must lie in (0,1]");
    LinkMatrix lm;
    lm.layer = sm.layer;
    lm.period = sm.period;
    lm.dir = sm.dir;
    lm.theta = theta;
    lm.index = sm.index;
    net::SquareMat p = net::partner_rows(sm);
    lm.l = net::SquareMat(p.n);
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j)
            if (i != j && p(i, j) >= theta) lm.l(i, j) = 1.0;
    return lm;
}

std::vector<double> spillover(const LinkMatrix& lm, const net::NodeSizes& sizes) {
    if (!lm.index.same_codes(sizes.index))
        throw data_error("IndexMismatch", "link matrix and sizes index differently");
    const int n = lm.l.n;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = lm.l.row(i);
        for (int j = 0; j < n; ++j)
            if (j != i && row[j] != 0.0) s += sizes.a[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> spillover_weighted(const net::ShareMatrix& sm, const net::NodeSizes& sizes) {
    if (!sm.index.same_codes(sizes.index))
        throw data_error("IndexMismatch", "share matrix and sizes index differently");
    net::SquareMat p = net::partner_rows(sm);
    const int n = p.n;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = p.row(i);
        for (int j = 0; j < n; ++j)
            if (j != i) s += row[j] * sizes.a[j];
        out[i] = s;
    }
    return out;
}

} // namespace ionet::spill
