#include "orchard/config.hpp"

#include <sstream>

#include "orchard/errors.hpp"
#include "orchard/util.hpp"

namespace orchard {

namespace {

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

double number_value(const std::string& key, const std::string& raw) {
    auto v = parse_double(raw);
    if (!v) fail(ErrorKind::config_error, "key '" + key + "': expected a number, got '" + raw + "'");
    return *v;
}

std::vector<double> array_value(const std::string& key, const std::string& raw) {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
        fail(ErrorKind::config_error, "key '" + key + "': expected [a, b, ...]");
    std::vector<double> out;
    std::string inner = raw.substr(1, raw.size() - 2);
    if (trim(inner).empty()) return out;
    for (const std::string& tok : split_char(inner, ',')) out.push_back(number_value(key, trim(tok)));
    return out;
}

void assign(PipelineConfig& c, const std::string& key, const std::string& raw) {
    if (key == "pmatrix") c.pmatrix_path = strip_quotes(raw);
    else if (key == "offset") c.offset_path = strip_quotes(raw);
    else if (key == "dtm") c.dtm_path = strip_quotes(raw);
    else if (key == "dsm") c.dsm_path = strip_quotes(raw);
    else if (key == "rows") c.rows_path = strip_quotes(raw);
    else if (key == "images_dir") c.images_dir = strip_quotes(raw);
    else if (key == "annotations_dir") c.annotations_dir = strip_quotes(raw);
    else if (key == "image_width") c.image_width = static_cast<int>(number_value(key, raw));
    else if (key == "image_height") c.image_height = static_cast<int>(number_value(key, raw));
    else if (key == "focal_px") c.focal_px = number_value(key, raw);
    else if (key == "crop_margin") c.crop_margin = number_value(key, raw);
    else if (key == "anchor_base_size") c.anchor_base_size = number_value(key, raw);
    else if (key == "min_dimension") c.min_dimension = number_value(key, raw);
    else if (key == "max_dimension") c.max_dimension = number_value(key, raw);
    else if (key == "anchor_scales") c.anchor_scales = array_value(key, raw);
    else if (key == "anchor_ratios") c.anchor_ratios = array_value(key, raw);
    else if (key == "height_stride") c.height_stride = number_value(key, raw);
    else if (key == "width_stride") c.width_stride = number_value(key, raw);
    else if (key == "nms_iou_threshold") c.nms_iou_threshold = number_value(key, raw);
    else if (key == "max_box_proposals") c.max_box_proposals = static_cast<int>(number_value(key, raw));
    else if (key == "momentum_gamma") c.momentum_gamma = number_value(key, raw);
    else if (key == "learning_rate") c.learning_rate = number_value(key, raw);
    else if (key == "calibration_weights") {
        std::vector<double> w = array_value(key, raw);
        if (w.size() != 2) fail(ErrorKind::config_error, "calibration_weights needs two entries");
        c.weight_tree = w[0];
        c.weight_ground = w[1];
    } else if (key == "min_visible_fraction") c.min_visible_fraction = number_value(key, raw);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(number_value(key, raw));
    else fail(ErrorKind::config_error, "unknown config key '" + key + "'");
}

} // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig config;
    std::istringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::config_error,
                 "line " + std::to_string(line_no) + ": expected key = value");
        }
        assign(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void apply_config_override(PipelineConfig& config, const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        fail(ErrorKind::config_error, "override must look like key=value: '" + assignment + "'");
    }
    assign(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

PipelineConfig load_config(const std::filesystem::path& path) {
    PipelineConfig config = parse_config(read_text_file(path));
    // Relative paths in a config file are taken relative to the file itself,
    // so a generated workspace stays self-contained and movable.
    std::filesystem::path base = path.parent_path();
    for (std::string* field : {&config.pmatrix_path, &config.offset_path, &config.dtm_path,
                               &config.dsm_path, &config.rows_path, &config.images_dir,
                               &config.annotations_dir}) {
        if (!field->empty() && std::filesystem::path(*field).is_relative()) {
            *field = (base / *field).string();
        }
    }
    return config;
}

std::string write_config(const PipelineConfig& c) {
    auto array = [](const std::vector<double>& values) {
        std::string out = "[";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out += ", ";
            out += format_g(values[i]);
        }
        return out + "]";
    };
    std::string out;
    out += "pmatrix = \"" + c.pmatrix_path + "\"\n";
    out += "offset = \"" + c.offset_path + "\"\n";
    out += "dtm = \"" + c.dtm_path + "\"\n";
    out += "dsm = \"" + c.dsm_path + "\"\n";
    out += "rows = \"" + c.rows_path + "\"\n";
    out += "images_dir = \"" + c.images_dir + "\"\n";
    out += "annotations_dir = \"" + c.annotations_dir + "\"\n";
    out += "image_width = " + std::to_string(c.image_width) + "\n";
    out += "image_height = " + std::to_string(c.image_height) + "\n";
    out += "focal_px = " + format_g(c.focal_px) + "\n";
    out += "crop_margin = " + format_g(c.crop_margin) + "\n";
    out += "anchor_base_size = " + format_g(c.anchor_base_size) + "\n";
    out += "min_dimension = " + format_g(c.min_dimension) + "\n";
    out += "max_dimension = " + format_g(c.max_dimension) + "\n";
    out += "anchor_scales = " + array(c.anchor_scales) + "\n";
    out += "anchor_ratios = " + array(c.anchor_ratios) + "\n";
    out += "height_stride = " + format_g(c.height_stride) + "\n";
    out += "width_stride = " + format_g(c.width_stride) + "\n";
    out += "nms_iou_threshold = " + format_g(c.nms_iou_threshold) + "\n";
    out += "max_box_proposals = " + std::to_string(c.max_box_proposals) + "\n";
    out += "momentum_gamma = " + format_g(c.momentum_gamma) + "\n";
    out += "learning_rate = " + format_g(c.learning_rate) + "\n";
    out += "calibration_weights = [" + format_g(c.weight_tree) + ", " + format_g(c.weight_ground) +
           "]\n";
    out += "min_visible_fraction = " + format_g(c.min_visible_fraction) + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";
    return out;
}

} // namespace orchard
