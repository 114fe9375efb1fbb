#include "orchard/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "orchard/util.hpp"

namespace orchard {

namespace {

[[noreturn]] void malformed(int line_no, const std::string& what) {
    fail(ErrorKind::malformed_line, "line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::pair<int, std::string>> nonblank_lines(const std::string& text) {
    std::vector<std::pair<int, std::string>> out;
    std::istringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        if (!trim(line).empty()) out.emplace_back(line_no, line);
    }
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

std::vector<ImagePose> parse_pmatrix(const std::string& text) {
    std::vector<ImagePose> poses;
    for (const auto& [line_no, line] : nonblank_lines(text)) {
        std::vector<std::string> toks = split_ws(line);
        if (toks.size() != 13) {
            malformed(line_no, "expected image name + 12 floats, got " +
                                   std::to_string(toks.size()) + " tokens");
        }
        ImagePose pose;
        pose.image_name = toks[0];
        for (int i = 0; i < 12; ++i) {
            auto v = parse_double(toks[static_cast<std::size_t>(i) + 1]);
            if (!v) malformed(line_no, "unparseable float '" + toks[static_cast<std::size_t>(i) + 1] + "'");
            pose.pmatrix.m[static_cast<std::size_t>(i)] = *v;
        }
        poses.push_back(std::move(pose));
    }
    return poses;
}

WorldOffset parse_offset(const std::string& text) {
    auto lines = nonblank_lines(text);
    if (lines.empty()) fail(ErrorKind::malformed_line, "offset file is empty");
    if (lines.size() > 1) malformed(lines[1].first, "offset file must contain a single line");
    const auto& [line_no, line] = lines[0];
    std::vector<std::string> toks = split_ws(line);
    if (toks.size() != 3) malformed(line_no, "expected 3 floats, got " + std::to_string(toks.size()));
    double v[3];
    for (int i = 0; i < 3; ++i) {
        auto p = parse_double(toks[static_cast<std::size_t>(i)]);
        if (!p) malformed(line_no, "unparseable float '" + toks[static_cast<std::size_t>(i)] + "'");
        v[i] = *p;
    }
    return WorldOffset{v[0], v[1], v[2]};
}

TerrainGrid parse_ascii_grid(const std::string& text) {
    std::istringstream ss(text);
    std::string tok;
    std::vector<std::string> tokens;
    while (ss >> tok) tokens.push_back(tok);

    TerrainGrid grid;
    bool have_ncols = false, have_nrows = false, have_xll = false, have_yll = false,
         have_cell = false;
    std::size_t i = 0;
    // Header section: `<name> <value>` pairs until the first bare number.
    while (i + 1 < tokens.size()) {
        std::string key = lower(tokens[i]);
        if (parse_double(tokens[i])) break; // start of data
        auto v = parse_double(tokens[i + 1]);
        if (!v) fail(ErrorKind::header_missing, "header '" + tokens[i] + "' has no numeric value");
        if (key == "ncols") {
            grid.ncols = static_cast<int>(*v);
            have_ncols = true;
        } else if (key == "nrows") {
            grid.nrows = static_cast<int>(*v);
            have_nrows = true;
        } else if (key == "xllcorner") {
            grid.xll = *v;
            have_xll = true;
        } else if (key == "yllcorner") {
            grid.yll = *v;
            have_yll = true;
        } else if (key == "cellsize") {
            grid.cellsize = *v;
            have_cell = true;
        } else if (key == "nodata_value") {
            grid.nodata = *v;
        } else {
            fail(ErrorKind::header_missing, "unknown header '" + tokens[i] + "'");
        }
        i += 2;
    }
    if (!have_ncols || !have_nrows || !have_xll || !have_yll || !have_cell) {
        fail(ErrorKind::header_missing,
             "grid header incomplete (need ncols, nrows, xllcorner, yllcorner, cellsize)");
    }
    if (grid.ncols < 1 || grid.nrows < 1 || grid.cellsize <= 0.0) {
        fail(ErrorKind::header_missing, "grid header values out of range");
    }

    std::size_t expected = static_cast<std::size_t>(grid.ncols) * static_cast<std::size_t>(grid.nrows);
    grid.values.reserve(expected);
    for (; i < tokens.size(); ++i) {
        auto v = parse_double(tokens[i]);
        if (!v) fail(ErrorKind::dimension_mismatch, "non-numeric data token '" + tokens[i] + "'");
        grid.values.push_back(*v);
    }
    if (grid.values.size() != expected) {
        fail(ErrorKind::dimension_mismatch,
             "declared " + std::to_string(grid.nrows) + "x" + std::to_string(grid.ncols) + " = " +
                 std::to_string(expected) + " values, found " + std::to_string(grid.values.size()));
    }
    return grid;
}

std::vector<RowSpec> parse_rows_csv(const std::string& text) {
    auto lines = nonblank_lines(text);
    if (lines.empty()) fail(ErrorKind::malformed_line, "rows CSV is empty");
    const std::string expected_header = "row,start_x,start_y,end_x,end_y,spacing";
    if (trim(lines[0].second) != expected_header) {
        malformed(lines[0].first, "expected header '" + expected_header + "'");
    }
    std::vector<RowSpec> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& [line_no, line] = lines[li];
        std::vector<std::string> toks = split_char(trim(line), ',');
        if (toks.size() != 6) malformed(line_no, "expected 6 fields");
        auto row_idx = parse_int(trim(toks[0]));
        if (!row_idx) malformed(line_no, "unparseable row index '" + toks[0] + "'");
        double v[5];
        for (int i = 0; i < 5; ++i) {
            auto p = parse_double(trim(toks[static_cast<std::size_t>(i) + 1]));
            if (!p) malformed(line_no, "unparseable float '" + toks[static_cast<std::size_t>(i) + 1] + "'");
            v[i] = *p;
        }
        if (v[4] <= 0.0) malformed(line_no, "spacing must be positive");
        rows.push_back(RowSpec{static_cast<int>(*row_idx), v[0], v[1], v[2], v[3], v[4]});
    }
    return rows;
}

std::string write_pmatrix(const std::vector<ImagePose>& poses, int significant_digits) {
    std::string out;
    for (const ImagePose& pose : poses) {
        out += pose.image_name;
        for (double v : pose.pmatrix.m) {
            out += ' ';
            out += format_g(v, significant_digits);
        }
        out += '\n';
    }
    return out;
}

std::string write_offset(const WorldOffset& offset, int significant_digits) {
    return format_g(offset.x, significant_digits) + " " + format_g(offset.y, significant_digits) +
           " " + format_g(offset.z, significant_digits) + "\n";
}

std::string write_ascii_grid(const TerrainGrid& grid, int significant_digits) {
    std::string out;
    out += "ncols " + std::to_string(grid.ncols) + "\n";
    out += "nrows " + std::to_string(grid.nrows) + "\n";
    out += "xllcorner " + format_g(grid.xll, significant_digits) + "\n";
    out += "yllcorner " + format_g(grid.yll, significant_digits) + "\n";
    out += "cellsize " + format_g(grid.cellsize, significant_digits) + "\n";
    out += "NODATA_value " + format_g(grid.nodata, significant_digits) + "\n";
    for (int r = 0; r < grid.nrows; ++r) {
        for (int c = 0; c < grid.ncols; ++c) {
            if (c) out += ' ';
            out += format_g(grid.at(r, c), significant_digits);
        }
        out += '\n';
    }
    return out;
}

std::string write_rows_csv(const std::vector<RowSpec>& rows, int significant_digits) {
    std::string out = "row,start_x,start_y,end_x,end_y,spacing\n";
    for (const RowSpec& r : rows) {
        out += std::to_string(r.row_index);
        for (double v : {r.start_x, r.start_y, r.end_x, r.end_y, r.spacing}) {
            out += ',';
            out += format_g(v, significant_digits);
        }
        out += '\n';
    }
    return out;
}

} // namespace orchard
