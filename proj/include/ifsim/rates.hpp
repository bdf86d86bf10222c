#pragma once

#include <optional>
#include <vector>

#include "ifsim/channel.hpp"

namespace ifsim {

// Rates in bits/s/Hz, indexed by link id.
using RateTuple = std::vector<double>;

inline constexpr int kDefaultSearchLimit = 12;

// Boundary points of the region count as achievable: a <= b up to a relative
// tolerance of 1e-12.
bool rate_leq(double a, double b);

enum class Decoder { Ian, Opt };

// Set of TXs whose messages RX `owner` jointly decodes; always contains the
// owner, everything else in the active set is treated as noise.
struct DecodeSet {
    int owner = 0;
    std::vector<int> decoded; // ascending ids, owner included
};

// log2(1 + P_kk / (1 + sum of interferer powers)): the supremum rate when all
// interference is treated as noise. The active set is the row's tx_ids.
double ian_rate(int k, const RxGainView& row);

// Multiple-access region check at the decode set's owner: every nonempty
// subset S of the decoded TXs must satisfy
//   sum_{i in S} R_i <= log2(1 + sum_{i in S} P_ki / (1 + noise floor)),
// with the noise floor collecting all active TXs outside the decode set.
bool achievable_with_decode_set(const DecodeSet& decode, const RateTuple& rates,
                                const RxGainView& row);

struct OptResult {
    double rate = 0.0;
    DecodeSet decode;
};

// Maximum own rate over decode sets, holding the other links' rates fixed.
// Exact over all decode sets when the active set has at most search_limit
// members; above that the search is restricted to nested sets of the
// strongest interferers by received power. Never below ian_rate.
OptResult opt_rate(int k, const RxGainView& row, const RateTuple& other_rates,
                   int search_limit = kDefaultSearchLimit);

// Rate tuple membership with explicitly chosen decode sets, one per active RX.
bool in_capacity_region(const RateTuple& rates, const GainMatrix& gains,
                        const std::vector<DecodeSet>& decode_sets);

// Existential form: true iff every active RX has some decode set (within the
// search policy) admitting the tuple.
bool in_capacity_region(const RateTuple& rates, const GainMatrix& gains,
                        const std::vector<int>& active,
                        int search_limit = kDefaultSearchLimit);

// Outage per the chosen decoder. IAN compares the coding rate against
// ian_rate; OPT searches decode sets given the interferers' current coding
// rates (genie knowledge, supplied by the engine).
bool outage(int k, double coding_rate, const RxGainView& row, Decoder decoder,
            const RateTuple& other_rates, int search_limit = kDefaultSearchLimit);

} // namespace ifsim
