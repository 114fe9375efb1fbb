#pragma once

#include <string>
#include <vector>

#include "orchard/boxes.hpp"

namespace orchard {

inline constexpr const char* kClassTreeApple = "tree_apple";
inline constexpr const char* kClassGroundApple = "ground_apple";

bool is_known_class(const std::string& label);

struct GroundTruthBox {
    std::string image_name;
    std::string class_label; // tree_apple | ground_apple
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    Box box() const { return Box{xmin, ymin, xmax, ymax}; }
};

struct VocAnnotation {
    std::string image_name; // from <filename>, may be empty
    int width = 0, height = 0;
    std::vector<GroundTruthBox> boxes;
};

// Parses one annotation file. Unknown class labels and degenerate (zero-area)
// boxes are rejected.
VocAnnotation parse_voc_annotation(const std::string& xml_text);

std::string write_voc_annotation(const VocAnnotation& annotation);

} // namespace orchard
