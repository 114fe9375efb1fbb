// orchard — batch tooling for drone-surveyed orchards: tree tagging and
// cropping from photogrammetry exports, anchor design from annotated boxes,
// detection evaluation, annotation augmentation and dataset splits.

#include <CLI11.hpp>

#include <algorithm>
#include <clocale>
#include <cmath>
#include <iostream>
#include <map>
#include <random>
#include <unordered_map>

#include "orchard/anchors.hpp"
#include "orchard/augment.hpp"
#include "orchard/config.hpp"
#include "orchard/crop.hpp"
#include "orchard/eval.hpp"
#include "orchard/image.hpp"
#include "orchard/ingest.hpp"
#include "orchard/synth.hpp"
#include "orchard/util.hpp"
#include "orchard/voc.hpp"

namespace fs = std::filesystem;
using namespace orchard;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::io_error:
        case ErrorKind::malformed_line:
        case ErrorKind::header_missing:
        case ErrorKind::dimension_mismatch:
        case ErrorKind::malformed_xml:
        case ErrorKind::unknown_class:
        case ErrorKind::degenerate_box:
            return 2;
        default:
            return 1;
    }
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config file")->required();
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    cmd->add_option("--set", args.overrides, "override a config key, e.g. --set seed=7");
}

PipelineConfig resolve_config(const CommonArgs& args) {
    PipelineConfig config = load_config(args.config_path);
    for (const std::string& assignment : args.overrides) apply_config_override(config, assignment);
    return config;
}

struct Project {
    WorldOffset offset;
    std::vector<ImagePose> poses;           // sorted by image name
    std::vector<TreeRecord> trees;          // global coordinates
    std::vector<TreeRecord> trees_local;    // offset removed, projection frame
    std::unordered_map<int, double> row_spacing;
};

Project load_project(const PipelineConfig& config) {
    Project project;
    project.offset = parse_offset(read_text_file(config.offset_path));
    project.poses = parse_pmatrix(read_text_file(config.pmatrix_path));
    std::sort(project.poses.begin(), project.poses.end(),
              [](const ImagePose& a, const ImagePose& b) { return a.image_name < b.image_name; });

    TerrainGrid dtm = parse_ascii_grid(read_text_file(config.dtm_path));
    TerrainGrid dsm = parse_ascii_grid(read_text_file(config.dsm_path));
    std::vector<RowSpec> rows = parse_rows_csv(read_text_file(config.rows_path));
    project.trees = build_tree_records(rows, dtm, dsm);
    for (const RowSpec& row : rows) project.row_spacing[row.row_index] = row.spacing;

    project.trees_local = project.trees;
    for (TreeRecord& tree : project.trees_local) {
        for (WorldPoint* p : {&tree.base, &tree.top}) {
            p->x -= project.offset.x;
            p->y -= project.offset.y;
            p->z -= project.offset.z;
        }
    }
    return project;
}

std::vector<TreeSighting> sightings_for_pose(const Project& project, const ImagePose& pose,
                                             const PipelineConfig& config) {
    CameraModel model = MatrixCamera{pose.pmatrix, config.image_width, config.image_height};
    return visible_trees(model, pose.image_name, project.trees_local);
}

int cmd_tag(const CommonArgs& args) {
    PipelineConfig config = resolve_config(args);
    Project project = load_project(config);

    fs::path tags_dir = fs::path(args.out_dir) / "tags";
    fs::create_directories(tags_dir);
    for (const ImagePose& pose : project.poses) {
        std::vector<TreeSighting> sightings = sightings_for_pose(project, pose, config);
        std::sort(sightings.begin(), sightings.end(),
                  [](const TreeSighting& a, const TreeSighting& b) { return a.tree_id < b.tree_id; });
        std::string csv = "tree_id,u,v\n";
        for (const TreeSighting& s : sightings) {
            csv += s.tree_id + "," + format_f(s.base_px.u, 3) + "," + format_f(s.base_px.v, 3) + "\n";
        }
        fs::path out = tags_dir / (fs::path(pose.image_name).stem().string() + ".csv");
        write_text_file_atomic(out, csv);
    }
    std::cout << "tagged " << project.poses.size() << " image(s), " << project.trees.size()
              << " tree(s)\n";
    return 0;
}

CropManifest build_manifest(const Project& project, const PipelineConfig& config) {
    std::vector<std::string> images;
    std::vector<TreeSighting> sightings;
    for (const ImagePose& pose : project.poses) {
        images.push_back(pose.image_name);
        std::vector<TreeSighting> s = sightings_for_pose(project, pose, config);
        sightings.insert(sightings.end(), s.begin(), s.end());
    }

    std::unordered_map<std::string, double> spacing_by_tree;
    std::vector<std::string> tree_ids;
    for (const TreeRecord& tree : project.trees) {
        tree_ids.push_back(tree.tree_id);
        spacing_by_tree[tree.tree_id] = project.row_spacing.at(tree.row);
    }

    CropPlanParams params;
    params.focal_px = config.focal_px;
    params.margin = config.crop_margin;
    params.image_width = config.image_width;
    params.image_height = config.image_height;
    if (!(params.focal_px > 0.0)) {
        fail(ErrorKind::config_error, "focal_px must be set for crop planning");
    }

    return dedup_assign(images, sightings, tree_ids, [&](const TreeSighting& s) {
        return plan_crop(s, spacing_by_tree.at(s.tree_id), params);
    });
}

int cmd_crop(const CommonArgs& args) {
    PipelineConfig config = resolve_config(args);
    Project project = load_project(config);
    CropManifest manifest = build_manifest(project, config);

    fs::path out_dir(args.out_dir);
    fs::path crops_dir = out_dir / "crops";
    fs::create_directories(crops_dir);
    write_text_file_atomic(out_dir / "manifest.csv", write_crop_manifest_csv(manifest));
    write_text_file_atomic(out_dir / "missing.txt", write_missing_list(manifest));
    for (const std::string& id : manifest.degenerate) {
        std::cerr << "warning: degenerate crop for tree " << id << ", skipped\n";
    }

    // Crops arrive grouped by image, so each source frame is decoded once.
    std::string loaded_name;
    Image loaded;
    for (const CropRect& crop : manifest.crops) {
        if (crop.image_name != loaded_name) {
            loaded = read_png(fs::path(config.images_dir) / crop.image_name);
            loaded_name = crop.image_name;
        }
        Image piece = crop_image(loaded, crop.xmin, crop.ymin, crop.xmax, crop.ymax);
        write_png(crops_dir / (crop.tree_id + ".png"), piece);
    }
    std::cout << "cropped " << manifest.crops.size() << " tree(s), " << manifest.missing.size()
              << " missing\n";
    return 0;
}

std::vector<fs::path> annotation_files(const std::string& dir) {
    if (!fs::is_directory(dir)) fail(ErrorKind::io_error, "not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

VocAnnotation load_annotation(const fs::path& file) {
    try {
        VocAnnotation anno = parse_voc_annotation(read_text_file(file));
        if (anno.image_name.empty()) {
            anno.image_name = file.stem().string();
            for (GroundTruthBox& b : anno.boxes) b.image_name = anno.image_name;
        }
        return anno;
    } catch (const Error& e) {
        throw Error(e.kind(), file.string() + ": " + e.what());
    }
}

int cmd_anchors(const CommonArgs& args, int k_max, int chosen_k, const std::string& metric_name) {
    PipelineConfig config = resolve_config(args);
    fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);

    // Groundtruth dimensions in resized-image space.
    std::vector<BoxDims> dims;
    std::string dims_csv = "w,h\n";
    for (const fs::path& file : annotation_files(config.annotations_dir)) {
        VocAnnotation anno = load_annotation(file);
        if (anno.width <= 0 || anno.height <= 0) continue;
        double scale = resize_scale(anno.width, anno.height, config.min_dimension,
                                    config.max_dimension);
        for (const GroundTruthBox& b : anno.boxes) {
            BoxDims d{(b.xmax - b.xmin) * scale, (b.ymax - b.ymin) * scale};
            dims.push_back(d);
            dims_csv += format_g(d.w) + "," + format_g(d.h) + "\n";
        }
    }
    if (dims.empty()) fail(ErrorKind::insufficient_boxes, "no groundtruth boxes found (0)");
    write_text_file_atomic(out_dir / "box_dims.csv", dims_csv);

    int effective_k_max = k_max;
    if (static_cast<std::size_t>(effective_k_max) > dims.size()) {
        effective_k_max = static_cast<int>(dims.size());
        std::cerr << "warning: k_max clamped to box count " << effective_k_max << "\n";
    }

    std::vector<ClusterResult> euclid =
        wss_curve(dims, effective_k_max, ClusterMetric::euclidean, config.seed);
    std::vector<ClusterResult> iou_curve =
        wss_curve(dims, effective_k_max, ClusterMetric::iou, config.seed);

    std::string wss_csv = "k,wss_euclid,wss_iou\n";
    for (int k = 1; k <= effective_k_max; ++k) {
        wss_csv += std::to_string(k) + "," +
                   format_g(euclid[static_cast<std::size_t>(k) - 1].wss) + "," +
                   format_g(iou_curve[static_cast<std::size_t>(k) - 1].wss) + "\n";
    }
    write_text_file_atomic(out_dir / "wss.csv", wss_csv);

    int suggestion = elbow_suggestion(wss_table(euclid));
    std::cout << "boxes: " << dims.size() << "\n";
    std::cout << "elbow suggestion (euclidean, max second difference): k = " << suggestion << "\n";

    if (chosen_k > 0) {
        if (static_cast<std::size_t>(chosen_k) > dims.size()) {
            fail(ErrorKind::insufficient_boxes,
                 "k = " + std::to_string(chosen_k) + " exceeds box count " +
                     std::to_string(dims.size()));
        }
        ClusterMetric metric =
            metric_name == "iou" ? ClusterMetric::iou : ClusterMetric::euclidean;
        const auto& curve = metric == ClusterMetric::iou ? iou_curve : euclid;
        const ClusterResult& result = curve[static_cast<std::size_t>(chosen_k) - 1];
        AnchorSpec spec = centroids_to_anchor_spec(result.centroids, config.anchor_base_size,
                                                   config.height_stride, config.width_stride);
        std::string fragment;
        fragment += "# anchor spec from k-means (" + metric_name + ", k = " +
                    std::to_string(chosen_k) + ", wss = " + format_g(result.wss) + ")\n";
        fragment += "anchor_base_size = " + format_g(spec.base_size) + "\n";
        std::string scales = "[", ratios = "[";
        for (std::size_t i = 0; i < spec.scales.size(); ++i) {
            if (i) {
                scales += ", ";
                ratios += ", ";
            }
            scales += format_g(spec.scales[i]);
            ratios += format_g(spec.aspect_ratios[i]);
        }
        fragment += "anchor_scales = " + scales + "]\n";
        fragment += "anchor_ratios = " + ratios + "]\n";
        fragment += "height_stride = " + format_g(spec.height_stride) + "\n";
        fragment += "width_stride = " + format_g(spec.width_stride) + "\n";
        write_text_file_atomic(out_dir / "anchor_spec.toml", fragment);
    }
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& detections_path, bool eleven_point) {
    PipelineConfig config = resolve_config(args);
    std::vector<Detection> dets = parse_detections_csv(read_text_file(detections_path));

    std::vector<GroundTruthBox> gts;
    for (const fs::path& file : annotation_files(config.annotations_dir)) {
        VocAnnotation anno = load_annotation(file);
        gts.insert(gts.end(), anno.boxes.begin(), anno.boxes.end());
    }

    EvalReport report = evaluate_detections(dets, gts, {config.weight_tree, config.weight_ground},
                                            config.max_box_proposals);
    for (const ClassReport& c : report.per_class) {
        if (c.n_gt == 0) {
            std::cerr << "note: class " << c.class_label << " has no groundtruth; AP is "
                      << (c.n_det == 0 ? "1 by convention" : "0") << "\n";
        }
    }

    fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    std::string csv = "class,ap@0.5\n";
    for (const ClassReport& c : report.per_class) {
        csv += c.class_label + "," + format_f(c.ap, 6) + "\n";
    }
    csv += "calibrated_map," + format_f(report.calibrated, 6) + "\n";
    csv += "true_map," + format_f(report.true_map, 6) + "\n";
    csv += "ar@[.5:.95]," + (report.ar ? format_f(*report.ar, 6) : std::string("n/a")) + "\n";
    write_text_file_atomic(out_dir / "metrics.csv", csv);
    std::cout << csv;

    if (eleven_point) {
        // Comparison only; the report CSV keeps the all-point interpolation.
        EvalReport eleven = evaluate_detections(dets, gts,
                                                {config.weight_tree, config.weight_ground},
                                                config.max_box_proposals, 0.5, true);
        for (const ClassReport& c : eleven.per_class) {
            std::cout << c.class_label << ",ap11@0.5," << format_f(c.ap, 6) << "\n";
        }
    }
    return 0;
}

int cmd_augment(const CommonArgs& args, const std::string& op_name, double angle) {
    PipelineConfig config = resolve_config(args);

    AugmentSpec spec;
    if (op_name == "rotate") spec.op = AugmentSpec::Op::rotate;
    else if (op_name == "none") spec.op = AugmentSpec::Op::none;
    else spec.op = AugmentSpec::Op::mirror_h;
    spec.angle_deg = angle;
    spec.validate();

    fs::path out_dir(args.out_dir);
    fs::path anno_dir = out_dir / "annotations";
    fs::create_directories(anno_dir);

    std::string log = "file,op,angle,boxes_in,boxes_out,dropped\n";
    for (const fs::path& file : annotation_files(config.annotations_dir)) {
        VocAnnotation anno = load_annotation(file);
        VocAnnotation out = anno;
        out.boxes.clear();
        int dropped = 0;
        for (const GroundTruthBox& b : anno.boxes) {
            std::optional<Box> moved = apply_augment(spec, b.box(), anno.width, anno.height,
                                                     config.min_visible_fraction);
            if (!moved) {
                ++dropped;
                continue;
            }
            GroundTruthBox nb = b;
            nb.xmin = std::floor(moved->xmin);
            nb.ymin = std::floor(moved->ymin);
            nb.xmax = std::ceil(moved->xmax);
            nb.ymax = std::ceil(moved->ymax);
            // Outward rounding may touch the frame edge; clamp back in.
            nb.xmax = std::min(nb.xmax, static_cast<double>(anno.width));
            nb.ymax = std::min(nb.ymax, static_cast<double>(anno.height));
            out.boxes.push_back(nb);
        }
        write_text_file_atomic(anno_dir / file.filename(), write_voc_annotation(out));
        log += file.filename().string() + "," + augment_op_name(spec.op) + "," +
               format_g(spec.angle_deg) + "," + std::to_string(anno.boxes.size()) + "," +
               std::to_string(out.boxes.size()) + "," + std::to_string(dropped) + "\n";
    }
    write_text_file_atomic(out_dir / "augment_log.csv", log);
    return 0;
}

int cmd_split(const CommonArgs& args) {
    PipelineConfig config = resolve_config(args);
    std::vector<fs::path> files = annotation_files(config.annotations_dir);
    std::vector<std::string> names;
    for (const fs::path& f : files) names.push_back(f.filename().string());

    std::mt19937_64 rng(mix_seed(config.seed, 12));
    shuffle_deterministic(names, rng);

    // 80:20 train-pool/test, then 80:20 train/val inside the pool.
    std::size_t n = names.size();
    std::size_t pool = n * 4 / 5;
    std::size_t train = pool * 4 / 5;

    auto join = [&](std::size_t begin, std::size_t end) {
        std::string out;
        for (std::size_t i = begin; i < end; ++i) out += names[i] + "\n";
        return out;
    };
    fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    write_text_file_atomic(out_dir / "train.txt", join(0, train));
    write_text_file_atomic(out_dir / "val.txt", join(train, pool));
    write_text_file_atomic(out_dir / "test.txt", join(pool, n));
    std::cout << "split " << n << " file(s): " << train << " train, " << (pool - train)
              << " val, " << (n - pool) << " test\n";
    return 0;
}

int cmd_synth(const std::string& out_dir, int n_rows, int trees_per_row, int n_poses,
              std::uint64_t seed, const std::string& terrain_name) {
    SceneSpec spec;
    spec.n_rows = n_rows;
    spec.trees_per_row = trees_per_row;
    spec.n_poses = n_poses;
    spec.seed = seed;
    if (terrain_name == "inclined") spec.terrain = TerrainKind::inclined;
    else if (terrain_name == "sinusoid") spec.terrain = TerrainKind::sinusoid;

    Scene scene = generate_scene(spec);
    fs::path dir(out_dir);
    write_scene_files(scene, dir);

    fs::path images_dir = dir / "images";
    fs::create_directories(images_dir);
    std::mt19937_64 rng(mix_seed(seed, 99));
    for (const ScenePose& pose : scene.poses) {
        Image frame = Image::solid(spec.image_width, spec.image_height,
                                   static_cast<std::uint8_t>(40 + uniform_below(rng, 80)),
                                   static_cast<std::uint8_t>(90 + uniform_below(rng, 80)), 60);
        write_png(images_dir / pose.image_name, frame);
    }

    // Paths are written relative to the config file, keeping the workspace
    // movable and its bytes independent of where it was generated.
    PipelineConfig config;
    config.pmatrix_path = "pmatrix.txt";
    config.offset_path = "offset.xyz";
    config.dtm_path = "dtm.asc";
    config.dsm_path = "dsm.asc";
    config.rows_path = "rows.csv";
    config.images_dir = "images";
    config.image_width = spec.image_width;
    config.image_height = spec.image_height;
    config.focal_px = spec.focal_px;
    config.seed = seed;
    write_text_file_atomic(dir / "config.toml", write_config(config));
    std::cout << "generated " << scene.trees.size() << " tree(s), " << scene.poses.size()
              << " pose(s), " << scene.sightings.size() << " sighting(s)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"orchard survey tooling: projection tagging, tree crops, anchor design, "
                 "detection metrics, augmentation and splits"};
    app.require_subcommand(1);

    CommonArgs tag_args, crop_args, anchor_args, eval_args, augment_args, split_args;

    CLI::App* tag = app.add_subcommand("tag", "project trees into images, write per-image tag CSVs");
    add_common(tag, tag_args);

    CLI::App* crop = app.add_subcommand("crop", "assign each tree to one image and cut crops");
    add_common(crop, crop_args);

    CLI::App* anchors = app.add_subcommand("anchors", "k-means anchor design from annotations");
    add_common(anchors, anchor_args);
    int k_max = 10, chosen_k = 0;
    std::string metric = "euclidean";
    anchors->add_option("--k-max", k_max, "largest k for the WSS table")->check(CLI::PositiveNumber);
    anchors->add_option("--k", chosen_k, "emit an anchor spec for this k");
    anchors->add_option("--metric", metric, "euclidean or iou")
        ->check(CLI::IsMember({"euclidean", "iou"}));

    CLI::App* eval = app.add_subcommand("eval", "PASCAL-VOC style evaluation of a detections CSV");
    add_common(eval, eval_args);
    std::string detections_path;
    bool eleven_point = false;
    eval->add_option("--detections", detections_path, "detections CSV")->required();
    eval->add_flag("--eleven-point", eleven_point, "also report 11-point interpolated AP");

    CLI::App* augment = app.add_subcommand("augment", "rewrite annotation boxes for a transform");
    add_common(augment, augment_args);
    std::string op = "mirror_h";
    double angle = 0.0;
    augment->add_option("--op", op, "mirror_h, rotate, or none (annotation pass-through)")
        ->check(CLI::IsMember({"mirror_h", "rotate", "none"}));
    augment->add_option("--angle", angle, "rotation angle in degrees, [-60, 60]");

    CLI::App* split = app.add_subcommand("split", "seeded 80:20 train/val/test manifests");
    add_common(split, split_args);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic survey for smoke tests");
    std::string synth_out, terrain_name = "flat";
    int n_rows = 5, trees_per_row = 20, n_poses = 20;
    std::uint64_t synth_seed = 0;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--rows", n_rows, "orchard rows");
    synth->add_option("--trees-per-row", trees_per_row, "trees per row");
    synth->add_option("--poses", n_poses, "camera poses");
    synth->add_option("--seed", synth_seed, "scene seed");
    synth->add_option("--terrain", terrain_name, "flat, inclined or sinusoid")
        ->check(CLI::IsMember({"flat", "inclined", "sinusoid"}));

    try {
        app.parse(argc, argv);
        if (tag->parsed()) return cmd_tag(tag_args);
        if (crop->parsed()) return cmd_crop(crop_args);
        if (anchors->parsed()) return cmd_anchors(anchor_args, k_max, chosen_k, metric);
        if (eval->parsed()) return cmd_eval(eval_args, detections_path, eleven_point);
        if (augment->parsed()) return cmd_augment(augment_args, op, angle);
        if (split->parsed()) return cmd_split(split_args);
        if (synth->parsed())
            return cmd_synth(synth_out, n_rows, trees_per_row, n_poses, synth_seed, terrain_name);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
