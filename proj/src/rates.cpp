#include "ifsim/rates.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ifsim {

namespace {

constexpr double kRelTol = 1e-12;
constexpr double kInvLn2 = 1.4426950408889634073599246810019;

double log2_1p(double x) { return std::log1p(x) * kInvLn2; }

int index_of(std::span<const int> ids, int id) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return -1;
    return static_cast<int>(it - ids.begin());
}

double total_power(const RxGainView& row) {
    return std::accumulate(row.power.begin(), row.power.end(), 0.0);
}

// Local view of one decode-set evaluation: the owner's power, the decoded
// interferers' powers and rates, and the noise floor from everything outside
// the set.
struct SetEval {
    double p_own = 0.0;
    double noise = 1.0;
    std::vector<double> p_others;
    std::vector<double> r_others;
};

// Largest own rate the MAC region admits for this decode set, or nullopt if
// the other links' rates alone already violate it. Enumerates every subset of
// the decoded interferers.
std::optional<double> own_rate_bound(const SetEval& ev) {
    const int m = static_cast<int>(ev.p_others.size());
    if (m > 26) throw std::invalid_argument("decode set too large to enumerate");
    const std::uint32_t n_masks = 1u << m;

    double bound = log2_1p(ev.p_own / ev.noise); // subset {k} alone
    if (m == 0) return bound;

    std::vector<double> sum_p(n_masks, 0.0);
    std::vector<double> sum_r(n_masks, 0.0);
    for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
        const std::uint32_t low = mask & (~mask + 1u);
        const int bit = std::countr_zero(low);
        sum_p[mask] = sum_p[mask ^ low] + ev.p_others[static_cast<std::size_t>(bit)];
        sum_r[mask] = sum_r[mask ^ low] + ev.r_others[static_cast<std::size_t>(bit)];
        // Constraint on the decoded others by themselves.
        if (!rate_leq(sum_r[mask], log2_1p(sum_p[mask] / ev.noise))) return std::nullopt;
        // Constraint on {k} united with this subset, solved for the own rate.
        bound = std::min(bound, log2_1p((ev.p_own + sum_p[mask]) / ev.noise) - sum_r[mask]);
    }
    // Once the others are feasible the own bound cannot go negative: the
    // united constraint dominates the others-only constraint term by term.
    return bound;
}

SetEval make_eval(int k, const RxGainView& row, std::span<const int> decoded_others,
                  const RateTuple& rates) {
    SetEval ev;
    const int k_idx = index_of(row.tx_ids, k);
    if (k_idx < 0) throw std::invalid_argument("rates: link is not in the active set");
    ev.p_own = row.power[static_cast<std::size_t>(k_idx)];
    ev.noise = 1.0 + total_power(row) - ev.p_own;
    ev.p_others.reserve(decoded_others.size());
    ev.r_others.reserve(decoded_others.size());
    for (int id : decoded_others) {
        const int idx = index_of(row.tx_ids, id);
        if (idx < 0) throw std::invalid_argument("rates: decoded TX is not active");
        const double p = row.power[static_cast<std::size_t>(idx)];
        ev.p_others.push_back(p);
        ev.r_others.push_back(rates[static_cast<std::size_t>(id)]);
        ev.noise -= p; // decoded TXs leave the noise floor
    }
    return ev;
}

// Candidate decode sets for the search policy, as index lists into the row's
// interferer positions. Exhaustive when the active set is small, otherwise
// nested prefixes of the strongest interferers.
std::vector<std::vector<int>> candidate_others(int k, const RxGainView& row,
                                               int search_limit) {
    std::vector<int> others; // row indices of interferers
    for (int i = 0; i < static_cast<int>(row.tx_ids.size()); ++i)
        if (row.tx_ids[static_cast<std::size_t>(i)] != k) others.push_back(i);

    std::vector<std::vector<int>> out;
    const int n_active = static_cast<int>(row.tx_ids.size());
    if (n_active <= search_limit) {
        const int m = static_cast<int>(others.size());
        std::vector<std::uint32_t> masks(1u << m);
        std::iota(masks.begin(), masks.end(), 0u);
        std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
            const int pa = std::popcount(a), pb = std::popcount(b);
            return pa != pb ? pa < pb : a < b;
        });
        out.reserve(masks.size());
        for (std::uint32_t mask : masks) {
            std::vector<int> set;
            for (int b = 0; b < m; ++b)
                if (mask & (1u << b)) set.push_back(others[static_cast<std::size_t>(b)]);
            out.push_back(std::move(set));
        }
    } else {
        std::sort(others.begin(), others.end(), [&](int a, int b) {
            return row.power[static_cast<std::size_t>(a)] > row.power[static_cast<std::size_t>(b)];
        });
        const int max_extra = std::min<int>(static_cast<int>(others.size()), search_limit - 1);
        out.reserve(static_cast<std::size_t>(max_extra) + 1);
        for (int take = 0; take <= max_extra; ++take)
            out.emplace_back(others.begin(), others.begin() + take);
    }
    return out;
}

} // namespace

bool rate_leq(double a, double b) {
    return a <= b + kRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

double ian_rate(int k, const RxGainView& row) {
    const int k_idx = index_of(row.tx_ids, k);
    if (k_idx < 0) throw std::invalid_argument("ian_rate: link is not in the active set");
    const double p_own = row.power[static_cast<std::size_t>(k_idx)];
    const double interference = total_power(row) - p_own;
    return log2_1p(p_own / (1.0 + interference));
}

bool achievable_with_decode_set(const DecodeSet& decode, const RateTuple& rates,
                                const RxGainView& row) {
    std::vector<int> others;
    others.reserve(decode.decoded.size());
    bool owner_present = false;
    for (int id : decode.decoded) {
        if (id == decode.owner) {
            owner_present = true;
            continue;
        }
        others.push_back(id);
    }
    if (!owner_present)
        throw std::invalid_argument("achievable_with_decode_set: owner must be decoded");

    const SetEval ev = make_eval(decode.owner, row, others, rates);
    const auto bound = own_rate_bound(ev);
    if (!bound) return false;
    return rate_leq(rates[static_cast<std::size_t>(decode.owner)], *bound);
}

OptResult opt_rate(int k, const RxGainView& row, const RateTuple& other_rates,
                   int search_limit) {
    OptResult best;
    best.rate = -1.0;
    for (const auto& others_idx : candidate_others(k, row, search_limit)) {
        std::vector<int> ids;
        ids.reserve(others_idx.size());
        for (int idx : others_idx) ids.push_back(row.tx_ids[static_cast<std::size_t>(idx)]);
        const SetEval ev = make_eval(k, row, ids, other_rates);
        const auto bound = own_rate_bound(ev);
        if (!bound) continue;
        if (*bound > best.rate + kRelTol * std::max(1.0, std::abs(best.rate))) {
            best.rate = *bound;
            best.decode.owner = k;
            best.decode.decoded = std::move(ids);
            best.decode.decoded.push_back(k);
            std::sort(best.decode.decoded.begin(), best.decode.decoded.end());
        }
    }
    if (best.rate < 0.0) best.rate = 0.0; // {k} is always feasible, so unreachable
    return best;
}

bool in_capacity_region(const RateTuple& rates, const GainMatrix& gains,
                        const std::vector<DecodeSet>& decode_sets) {
    for (const auto& ds : decode_sets) {
        int row_idx = -1;
        for (int r = 0; r < gains.rows(); ++r)
            if (gains.rx_ids[static_cast<std::size_t>(r)] == ds.owner) {
                row_idx = r;
                break;
            }
        if (row_idx < 0)
            throw std::invalid_argument("in_capacity_region: decode set owner has no row");
        if (!achievable_with_decode_set(ds, rates, row_view(gains, row_idx))) return false;
    }
    return true;
}

bool in_capacity_region(const RateTuple& rates, const GainMatrix& gains,
                        const std::vector<int>& active, int search_limit) {
    for (int k : active) {
        int row_idx = -1;
        for (int r = 0; r < gains.rows(); ++r)
            if (gains.rx_ids[static_cast<std::size_t>(r)] == k) {
                row_idx = r;
                break;
            }
        if (row_idx < 0) throw std::invalid_argument("in_capacity_region: no row for link");
        const RxGainView row = row_view(gains, row_idx);

        bool ok = false;
        for (const auto& others_idx : candidate_others(k, row, search_limit)) {
            std::vector<int> ids;
            ids.reserve(others_idx.size());
            for (int idx : others_idx) ids.push_back(row.tx_ids[static_cast<std::size_t>(idx)]);
            const SetEval ev = make_eval(k, row, ids, rates);
            const auto bound = own_rate_bound(ev);
            if (bound && rate_leq(rates[static_cast<std::size_t>(k)], *bound)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

bool outage(int k, double coding_rate, const RxGainView& row, Decoder decoder,
            const RateTuple& other_rates, int search_limit) {
    if (coding_rate <= 0.0) return false;
    if (decoder == Decoder::Ian) return !rate_leq(coding_rate, ian_rate(k, row));

    for (const auto& others_idx : candidate_others(k, row, search_limit)) {
        std::vector<int> ids;
        ids.reserve(others_idx.size());
        for (int idx : others_idx) ids.push_back(row.tx_ids[static_cast<std::size_t>(idx)]);
        const SetEval ev = make_eval(k, row, ids, other_rates);
        const auto bound = own_rate_bound(ev);
        if (bound && rate_leq(coding_rate, *bound)) return false;
    }
    return true;
}

} // namespace ifsim
