#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ens {

using TokenSeq = std::vector<int>;

// One labeled (or unlabeled, label == -1) opcode sequence.
struct Sample {
    std::string id;
    TokenSeq tokens;
    int label = -1;
};

// The m x n training matrix: column i is the feature vector of sample i,
// each row one feature type. Sequence scorers read the parallel token view
// instead of the vector columns; both views stay index-aligned.
struct FeatureMatrix {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<std::vector<double>> columns;  // n vectors of length m
    std::vector<TokenSeq> sequence_view;       // empty, or exactly n entries
    std::vector<std::string> row_labels;       // m entries
    std::size_t vocab_size = 0;

    bool has_sequences() const { return !sequence_view.empty(); }

    void check() const {
        if (columns.size() != n) throw std::invalid_argument("FeatureMatrix: column count != n");
        for (const auto& c : columns)
            if (c.size() != m) throw std::invalid_argument("FeatureMatrix: column length != m");
        if (!sequence_view.empty() && sequence_view.size() != n)
            throw std::invalid_argument("FeatureMatrix: sequence view not aligned with columns");
    }
};

// One test point, exposing both views of the sample. Vector scorers read
// `features`, sequence scorers read `tokens`; either may be empty when the
// corresponding representation was not built.
struct Instance {
    std::span<const double> features;
    std::span<const int> tokens;
};

inline Instance instance_at(const FeatureMatrix& fm, std::size_t i) {
    Instance x;
    x.features = fm.columns[i];
    if (fm.has_sequences()) x.tokens = fm.sequence_view[i];
    return x;
}

// A named, ordered parameter vector. Values are typed; scorer trainers
// convert to their own config structs and reject out-of-domain values.
class ParamSet {
public:
    using Value = std::variant<double, std::int64_t, std::string, std::uint64_t>;

    void set_real(const std::string& name, double v) { set(name, Value(v)); }
    void set_int(const std::string& name, std::int64_t v) { set(name, Value(v)); }
    void set_text(const std::string& name, std::string v) { set(name, Value(std::move(v))); }
    void set_seed(const std::string& name, std::uint64_t v) { set(name, Value(v)); }

    bool has(const std::string& name) const { return index_of(name) >= 0; }
    std::size_t size() const { return entries_.size(); }

    double real(const std::string& name) const {
        const Value& v = at(name);
        if (const double* d = std::get_if<double>(&v)) return *d;
        if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        throw std::invalid_argument("ParamSet: '" + name + "' is not numeric");
    }
    std::int64_t integer(const std::string& name) const {
        const Value& v = at(name);
        if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return *i;
        throw std::invalid_argument("ParamSet: '" + name + "' is not an integer");
    }
    const std::string& text(const std::string& name) const {
        const Value& v = at(name);
        if (const std::string* s = std::get_if<std::string>(&v)) return *s;
        throw std::invalid_argument("ParamSet: '" + name + "' is not text");
    }
    std::uint64_t seed(const std::string& name) const {
        const Value& v = at(name);
        if (const std::uint64_t* s = std::get_if<std::uint64_t>(&v)) return *s;
        if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return static_cast<std::uint64_t>(*i);
        throw std::invalid_argument("ParamSet: '" + name + "' is not a seed");
    }

    double real_or(const std::string& name, double dflt) const { return has(name) ? real(name) : dflt; }
    std::int64_t integer_or(const std::string& name, std::int64_t dflt) const { return has(name) ? integer(name) : dflt; }
    std::string text_or(const std::string& name, const std::string& dflt) const { return has(name) ? text(name) : dflt; }
    std::uint64_t seed_or(const std::string& name, std::uint64_t dflt) const { return has(name) ? seed(name) : dflt; }

    const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

private:
    void set(const std::string& name, Value v) {
        int i = index_of(name);
        if (i >= 0) {
            entries_[static_cast<std::size_t>(i)].second = std::move(v);
        } else {
            entries_.emplace_back(name, std::move(v));
        }
    }
    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].first == name) return static_cast<int>(i);
        return -1;
    }
    const Value& at(const std::string& name) const {
        int i = index_of(name);
        if (i < 0) throw std::invalid_argument("ParamSet: missing parameter '" + name + "'");
        return entries_[static_cast<std::size_t>(i)].second;
    }

    std::vector<std::pair<std::string, Value>> entries_;  // insertion order kept
};

}  // namespace ens
