#include "dubline/json_io.hpp"

#include <fstream>

namespace dubline {

void read_value(const Json& j, const std::string& path, double& out) {
    if (!j.is_number()) throw InvalidArgument(path + ": expected a number");
    out = j.get<double>();
}

void read_value(const Json& j, const std::string& path, bool& out) {
    if (!j.is_boolean()) throw InvalidArgument(path + ": expected a boolean");
    out = j.get<bool>();
}

void read_value(const Json& j, const std::string& path, std::string& out) {
    if (!j.is_string()) throw InvalidArgument(path + ": expected a string");
    out = j.get<std::string>();
}

ObjectReader::ObjectReader(const Json& j, std::string path) : object_(j), path_(std::move(path)) {
    if (!j.is_object()) throw InvalidArgument(path_ + ": expected an object");
}

void ObjectReader::finish() const {
    for (const auto& [key, value] : object_.items()) {
        if (!seen_.contains(key)) throw InvalidArgument(child(key) + ": unknown key");
    }
}

void read_value(const Json& j, const std::string& path, AngleSet& out) {
    std::vector<double> degrees;
    double step = 1.0;
    ObjectReader(j, path).required("degrees", degrees).required("step", step).finish();
    try {
        out = AngleSet(std::move(degrees), step);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

void read_value(const Json& j, const std::string& path, ThresholdPolicy& out) {
    ObjectReader reader(j, path);
    std::string policy;
    reader.required("policy", policy);
    if (policy == "fixed") {
        FixedThreshold t;
        reader.required("lambda", t.lambda).finish();
        out = t;
    } else if (policy == "row_sum") {
        RowSumThreshold t;
        reader.optional("scale", t.scale).finish();
        out = t;
    } else {
        throw InvalidArgument(reader.child("policy") + ": expected \"fixed\" or \"row_sum\"");
    }
}

void read_value(const Json& j, const std::string& path, OperatorSpec& out) {
    ObjectReader(j, path)
        .required("width", out.width)
        .required("height", out.height)
        .required("radii_count", out.radii_count)
        .required("angles", out.angles)
        .finish();
}

void read_value(const Json& j, const std::string& path, LineKind& out) {
    std::string name;
    read_value(j, path, name);
    try {
        out = line_kind_from_string(name);
    } catch (const InvalidArgument&) {
        throw InvalidArgument(path + ": unknown line kind \"" + name + "\"");
    }
}

void read_value(const Json& j, const std::string& path, BLineSpec& out) {
    ObjectReader(j, path)
        .required("origin", out.origin)
        .optional("width_px", out.width_px)
        .optional("intensity", out.intensity)
        .finish();
}

void read_value(const Json& j, const std::string& path, TruncatedLineSpec& out) {
    ObjectReader(j, path)
        .required("origin", out.origin)
        .optional("width_px", out.width_px)
        .optional("intensity", out.intensity)
        .required("stop_a_line", out.stop_a_line)
        .finish();
}

void read_value(const Json& j, const std::string& path, PhantomSpec& out) {
    ObjectReader(j, path)
        .optional("pleural_depth", out.pleural_depth)
        .optional("pleural_intensity", out.pleural_intensity)
        .optional("line_width_px", out.line_width_px)
        .optional("a_line_count", out.a_line_count)
        .optional("a_line_spacing", out.a_line_spacing)
        .optional("a_line_intensity", out.a_line_intensity)
        .optional("a_line_decay", out.a_line_decay)
        .optional("b_lines", out.b_lines)
        .optional("truncated_lines", out.truncated_lines)
        .optional("speckle_sigma", out.speckle_sigma)
        .optional("blur_radius", out.blur_radius)
        .optional("background_gain", out.background_gain)
        .optional("box_width_px", out.box_width_px)
        .optional("seed", out.seed)
        .finish();
}

void read_value(const Json& j, const std::string& path, GroundTruthBox& out) {
    ObjectReader(j, path)
        .required("x_center", out.x_center)
        .required("width", out.width)
        .required("y_top", out.y_top)
        .required("y_bottom", out.y_bottom)
        .finish();
}

void read_value(const Json& j, const std::string& path, DetectedLine& out) {
    ObjectReader(j, path)
        .required("kind", out.kind)
        .required("r", out.r)
        .required("omega", out.omega)
        .optional("score", out.score)
        .optional("origin_x", out.origin_x)
        .finish();
}

void read_value(const Json& j, const std::string& path, MatchBand& out) {
    std::string name;
    read_value(j, path, name);
    if (name == "quarter_width") {
        out = MatchBand::quarter_width;
    } else if (name == "half_width") {
        out = MatchBand::half_width;
    } else {
        throw InvalidArgument(path + ": expected \"quarter_width\" or \"half_width\"");
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

void to_json(Json& j, const AngleSet& v) {
    j = Json{{"degrees", std::vector<double>(v.degrees().begin(), v.degrees().end())}, {"step", v.step()}};
}

void to_json(Json& j, const ThresholdPolicy& v) {
    if (const auto* fixed = std::get_if<FixedThreshold>(&v)) {
        j = Json{{"policy", "fixed"}, {"lambda", fixed->lambda}};
    } else {
        j = Json{{"policy", "row_sum"}, {"scale", std::get<RowSumThreshold>(v).scale}};
    }
}

void to_json(Json& j, const OperatorSpec& v) {
    j = Json{{"width", v.width}, {"height", v.height}, {"radii_count", v.radii_count}, {"angles", v.angles}};
}

void to_json(Json& j, const LineKind& v) { j = std::string(to_string(v)); }

void to_json(Json& j, const BLineSpec& v) {
    j = Json{{"origin", v.origin}, {"width_px", v.width_px}, {"intensity", v.intensity}};
}

void to_json(Json& j, const TruncatedLineSpec& v) {
    j = Json{{"origin", v.origin},
             {"width_px", v.width_px},
             {"intensity", v.intensity},
             {"stop_a_line", v.stop_a_line}};
}

void to_json(Json& j, const PhantomSpec& v) {
    j = Json{{"pleural_depth", v.pleural_depth},
             {"pleural_intensity", v.pleural_intensity},
             {"line_width_px", v.line_width_px},
             {"a_line_count", v.a_line_count},
             {"a_line_spacing", v.a_line_spacing},
             {"a_line_intensity", v.a_line_intensity},
             {"a_line_decay", v.a_line_decay},
             {"b_lines", v.b_lines},
             {"truncated_lines", v.truncated_lines},
             {"speckle_sigma", v.speckle_sigma},
             {"blur_radius", v.blur_radius},
             {"background_gain", v.background_gain},
             {"box_width_px", v.box_width_px},
             {"seed", v.seed}};
}

void to_json(Json& j, const GroundTruthBox& v) {
    j = Json{{"x_center", v.x_center}, {"width", v.width}, {"y_top", v.y_top}, {"y_bottom", v.y_bottom}};
}

void to_json(Json& j, const DetectedLine& v) {
    j = Json{{"kind", v.kind}, {"r", v.r}, {"omega", v.omega}, {"score", v.score}};
    j["origin_x"] = v.origin_x ? Json(*v.origin_x) : Json(nullptr);
}

void to_json(Json& j, const MatchBand& v) {
    j = v == MatchBand::quarter_width ? "quarter_width" : "half_width";
}

void to_json(Json& j, const MatchCounts& v) { j = Json{{"tp", v.tp}, {"fp", v.fp}, {"fn", v.fn}}; }

void to_json(Json& j, const EvalReport& v) {
    Json per_image = Json::array();
    for (const auto& e : v.per_image) {
        Json row = e.counts;
        row["name"] = e.name;
        per_image.push_back(std::move(row));
    }
    j = Json{{"tp", v.tp},           {"fp", v.fp},         {"fn", v.fn}, {"precision", v.precision},
             {"recall", v.recall},   {"f1", v.f1},         {"per_image", std::move(per_image)}};
}

void to_json(Json& j, const SolverTiming& v) {
    j = Json{{"name", v.name},
             {"mean_seconds", v.mean_seconds},
             {"median_seconds", v.median_seconds},
             {"min_seconds", v.min_seconds},
             {"samples", v.samples.size()}};
}

void to_json(Json& j, const BenchReport& v) {
    j = Json{{"solvers", v.solvers},
             {"image_count", v.image_count},
             {"repetitions", v.repetitions},
             {"speedup", v.speedup}};
}

void to_json(Json& j, const EpochRecord& v) {
    j = Json{{"epoch", v.epoch}, {"mean_loss", v.mean_loss}, {"learning_rate", v.learning_rate},
             {"seconds", v.seconds}};
}

}  // namespace dubline
