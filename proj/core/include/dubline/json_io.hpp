#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dubline/angle_set.hpp"
#include "dubline/error.hpp"
#include "dubline/eval.hpp"
#include "dubline/lines.hpp"
#include "dubline/phantom.hpp"
#include "dubline/prox.hpp"
#include "dubline/train.hpp"
#include "dubline/unfold.hpp"

// Strict JSON mapping: readers reject unknown keys and wrong types with an
// InvalidArgument naming the JSON path (e.g. "$.b_lines[1].origin").

namespace dubline {

using Json = nlohmann::json;

void read_value(const Json& j, const std::string& path, double& out);
void read_value(const Json& j, const std::string& path, bool& out);
void read_value(const Json& j, const std::string& path, std::string& out);
/// Raw passthrough for values parsed later by the caller.
inline void read_value(const Json& j, const std::string&, Json& out) { out = j; }

template <std::unsigned_integral T>
void read_value(const Json& j, const std::string& path, T& out) {
    if (j.is_number_unsigned()) {
        out = j.get<T>();
        return;
    }
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
        out = static_cast<T>(j.get<std::int64_t>());
        return;
    }
    throw InvalidArgument(path + ": expected a non-negative integer");
}

template <class T>
void read_value(const Json& j, const std::string& path, std::vector<T>& out);
template <class T>
void read_value(const Json& j, const std::string& path, std::optional<T>& out);

class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path);

    template <class T>
    ObjectReader& optional(std::string_view key, T& out) {
        if (auto it = object_.find(std::string(key)); it != object_.end()) {
            seen_.emplace(key);
            read_value(*it, child(key), out);
        }
        return *this;
    }

    template <class T>
    ObjectReader& required(std::string_view key, T& out) {
        if (!object_.contains(std::string(key))) {
            throw InvalidArgument(child(key) + ": missing required key");
        }
        return optional(key, out);
    }

    bool has(std::string_view key) const { return object_.contains(std::string(key)); }
    std::string child(std::string_view key) const { return path_ + "." + std::string(key); }
    const std::string& path() const noexcept { return path_; }

    /// Throws on the first key that no optional()/required() call consumed.
    void finish() const;

private:
    const Json& object_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

template <class T>
void read_value(const Json& j, const std::string& path, std::vector<T>& out) {
    if (!j.is_array()) throw InvalidArgument(path + ": expected an array");
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        T value{};
        read_value(j[i], path + "[" + std::to_string(i) + "]", value);
        out.push_back(std::move(value));
    }
}

template <class T>
void read_value(const Json& j, const std::string& path, std::optional<T>& out) {
    if (j.is_null()) {
        out.reset();
        return;
    }
    T value{};
    read_value(j, path, value);
    out = std::move(value);
}

void read_value(const Json& j, const std::string& path, AngleSet& out);
void read_value(const Json& j, const std::string& path, ThresholdPolicy& out);
void read_value(const Json& j, const std::string& path, OperatorSpec& out);
void read_value(const Json& j, const std::string& path, LineKind& out);
void read_value(const Json& j, const std::string& path, BLineSpec& out);
void read_value(const Json& j, const std::string& path, TruncatedLineSpec& out);
void read_value(const Json& j, const std::string& path, PhantomSpec& out);
void read_value(const Json& j, const std::string& path, GroundTruthBox& out);
void read_value(const Json& j, const std::string& path, DetectedLine& out);
void read_value(const Json& j, const std::string& path, MatchBand& out);

/// Reads a whole document rooted at "$".
template <class T>
T parse_json(const Json& j) {
    T out{};
    read_value(j, "$", out);
    return out;
}

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

void to_json(Json& j, const AngleSet& v);
void to_json(Json& j, const ThresholdPolicy& v);
void to_json(Json& j, const OperatorSpec& v);
void to_json(Json& j, const LineKind& v);
void to_json(Json& j, const BLineSpec& v);
void to_json(Json& j, const TruncatedLineSpec& v);
void to_json(Json& j, const PhantomSpec& v);
void to_json(Json& j, const GroundTruthBox& v);
void to_json(Json& j, const DetectedLine& v);
void to_json(Json& j, const MatchBand& v);
void to_json(Json& j, const MatchCounts& v);
void to_json(Json& j, const EvalReport& v);
void to_json(Json& j, const SolverTiming& v);
void to_json(Json& j, const BenchReport& v);
void to_json(Json& j, const EpochRecord& v);

}  // namespace dubline
