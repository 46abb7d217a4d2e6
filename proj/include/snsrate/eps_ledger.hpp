#pragma once
// Failure-probability bookkeeping. Every statistical step that can fail logs
// what it consumed, tagged by which estimate chain it belongs to: the count
// chain (how many good bits survive) or the phase chain (how noisy they are).
// The final security statement needs the two chain totals separately, so an
// entry left unassigned is an accounting bug, not a default.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace snsrate {

enum class EpsChain { unassigned, count, phase };

struct EpsEntry {
    std::string label;
    EpsChain chain = EpsChain::unassigned;
    double value = 0.0;
    int multiplicity = 1;
};

class EpsLedger {
public:
    void log(std::string label, EpsChain chain, double value, int multiplicity = 1) {
        if (!(value >= 0.0) || !(value <= 1.0))
            throw std::invalid_argument("eps ledger: value outside [0,1]");
        if (multiplicity <= 0) throw std::invalid_argument("eps ledger: bad multiplicity");
        entries_.push_back({std::move(label), chain, value, multiplicity});
    }

    void merge(const EpsLedger& other) {
        entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
    }

    double total(EpsChain chain) const {
        double s = 0.0;
        for (const auto& e : entries_)
            if (e.chain == chain) s += e.value * e.multiplicity;
        return s;
    }

    // number of consumed terms, counting multiplicity
    int term_count() const {
        int n = 0;
        for (const auto& e : entries_) n += e.multiplicity;
        return n;
    }

    bool has_unassigned() const {
        for (const auto& e : entries_)
            if (e.chain == EpsChain::unassigned) return true;
        return false;
    }

    const std::vector<EpsEntry>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

private:
    std::vector<EpsEntry> entries_;
};

} // namespace snsrate
