#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "cinekit/container.hpp"
#include "cinekit/phantom.hpp"

namespace ck {

/// Size and split description of a synthetic dataset build.
struct DatasetSpec {
    int subjects_train = 40;
    int subjects_val = 10;
    int subjects_test = 10;
    int t_frames = 20;
    int grid_h = 32;
    int grid_w = 32;
    std::uint64_t seed = 0;

    int total() const { return subjects_train + subjects_val + subjects_test; }

    void validate() const {
        check_arg(subjects_train >= 0 && subjects_val >= 0 && subjects_test >= 0,
                  "split sizes must be >= 0");
        check_arg(total() > 0, "dataset must contain at least one subject");
        check_arg(t_frames >= 2, "dataset sequences need at least two frames");
        check_arg(grid_h >= 8 && grid_w >= 8 && grid_h % 2 == 0 && grid_w % 2 == 0,
                  "grid extents must be even and at least 8");
    }
};

struct SubjectInfo {
    int id = 0;
    std::string split;
    std::string file;
    PhantomParams params;
};

struct Subject {
    SubjectInfo info;
    CineSequence clean;
};

struct Dataset {
    DatasetSpec spec;
    std::vector<Subject> subjects;

    std::vector<const Subject*> split(const std::string& name) const {
        std::vector<const Subject*> out;
        for (const Subject& s : subjects)
            if (s.info.split == name) out.push_back(&s);
        return out;
    }
};

inline void to_json(nlohmann::json& j, const PhantomParams& p) {
    j = nlohmann::json{{"t_frames", p.t_frames},
                       {"grid_h", p.grid_h},
                       {"grid_w", p.grid_w},
                       {"center_y", p.center_y},
                       {"center_x", p.center_x},
                       {"epi_radius", p.epi_radius},
                       {"endo_radius", p.endo_radius},
                       {"contraction_amp", p.contraction_amp},
                       {"phase", p.phase},
                       {"intensity_background", p.intensity_background},
                       {"intensity_body", p.intensity_body},
                       {"intensity_myocardium", p.intensity_myocardium},
                       {"intensity_blood", p.intensity_blood},
                       {"texture_sigma", p.texture_sigma},
                       {"texture_amp", p.texture_amp},
                       {"seed", p.seed}};
}

inline void from_json(const nlohmann::json& j, PhantomParams& p) {
    j.at("t_frames").get_to(p.t_frames);
    j.at("grid_h").get_to(p.grid_h);
    j.at("grid_w").get_to(p.grid_w);
    j.at("center_y").get_to(p.center_y);
    j.at("center_x").get_to(p.center_x);
    j.at("epi_radius").get_to(p.epi_radius);
    j.at("endo_radius").get_to(p.endo_radius);
    j.at("contraction_amp").get_to(p.contraction_amp);
    j.at("phase").get_to(p.phase);
    j.at("intensity_background").get_to(p.intensity_background);
    j.at("intensity_body").get_to(p.intensity_body);
    j.at("intensity_myocardium").get_to(p.intensity_myocardium);
    j.at("intensity_blood").get_to(p.intensity_blood);
    j.at("texture_sigma").get_to(p.texture_sigma);
    j.at("texture_amp").get_to(p.texture_amp);
    p.seed = j.at("seed").get<std::uint64_t>();
}

/// Draws one subject's anatomy. The contraction amplitude is sampled as a
/// fraction of the tighter radial margin, so the annulus stays valid for
/// every draw by construction.
inline PhantomParams sample_subject_params(const DatasetSpec& spec, int subject_id) {
    Rng rng = Rng::derive(spec.seed, {0x5b, static_cast<std::uint64_t>(subject_id)});
    const double s = std::min(spec.grid_h, spec.grid_w) / 64.0;

    PhantomParams p;
    p.t_frames = spec.t_frames;
    p.grid_h = spec.grid_h;
    p.grid_w = spec.grid_w;
    p.center_y = 0.5 * spec.grid_h + rng.uniform(-3.0, 3.0) * s;
    p.center_x = 0.5 * spec.grid_w + rng.uniform(-3.0, 3.0) * s;
    p.epi_radius = rng.uniform(12.0, 16.0) * s;
    p.endo_radius = rng.uniform(6.8, 9.2) * s;
    p.contraction_amp =
        rng.uniform(0.4, 0.7) * std::min(p.endo_radius, p.epi_radius - p.endo_radius);
    p.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    p.intensity_background = 0.05 + rng.uniform(-0.03, 0.03);
    p.intensity_body = 0.30 + rng.uniform(-0.06, 0.06);
    p.intensity_myocardium = 0.55 + rng.uniform(-0.07, 0.07);
    p.intensity_blood = 0.85 + rng.uniform(-0.07, 0.07);
    p.texture_sigma = std::max(0.6, 1.5 * s);
    p.texture_amp = 0.04;
    p.seed = mix64(spec.seed ^ mix64(static_cast<std::uint64_t>(subject_id) + 0x9e37));
    p.validate();
    return p;
}

namespace detail {

inline std::string subject_file_name(int id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "subj_%03d.ckt", id);
    return buf;
}

}  // namespace detail

/// Generates all subjects, writes one archive per subject (entry "clean")
/// plus manifest.json. Fully determined by the spec.
inline std::vector<SubjectInfo> build_dataset(const DatasetSpec& spec,
                                              const std::filesystem::path& dir) {
    spec.validate();
    std::filesystem::create_directories(dir);
    std::vector<SubjectInfo> infos;
    nlohmann::json subjects_json = nlohmann::json::array();
    for (int id = 0; id < spec.total(); ++id) {
        SubjectInfo info;
        info.id = id;
        info.split = id < spec.subjects_train                     ? "train"
                     : id < spec.subjects_train + spec.subjects_val ? "val"
                                                                    : "test";
        info.file = detail::subject_file_name(id);
        info.params = sample_subject_params(spec, id);

        CineSequence clean = generate_phantom(info.params);
        CktArchive archive;
        archive.emplace_back("clean", to_record(clean));
        write_archive_file(dir / info.file, archive);

        nlohmann::json js;
        js["id"] = info.id;
        js["split"] = info.split;
        js["file"] = info.file;
        js["params"] = info.params;
        subjects_json.push_back(js);
        infos.push_back(std::move(info));
    }

    nlohmann::json manifest;
    manifest["tool"] = kToolVersion;
    manifest["kind"] = "dataset";
    manifest["seed"] = spec.seed;
    manifest["t_frames"] = spec.t_frames;
    manifest["grid_h"] = spec.grid_h;
    manifest["grid_w"] = spec.grid_w;
    manifest["splits"] = {{"train", spec.subjects_train},
                          {"val", spec.subjects_val},
                          {"test", spec.subjects_test}};
    manifest["subjects"] = subjects_json;

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
    return infos;
}

/// Loads manifest plus every subject's clean sequence.
inline Dataset load_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("cannot open manifest in " + dir.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("manifest", 0, e.what());
    }

    Dataset ds;
    try {
        ds.spec.seed = manifest.at("seed").get<std::uint64_t>();
        ds.spec.t_frames = manifest.at("t_frames").get<int>();
        ds.spec.grid_h = manifest.at("grid_h").get<int>();
        ds.spec.grid_w = manifest.at("grid_w").get<int>();
        ds.spec.subjects_train = manifest.at("splits").at("train").get<int>();
        ds.spec.subjects_val = manifest.at("splits").at("val").get<int>();
        ds.spec.subjects_test = manifest.at("splits").at("test").get<int>();
        for (const auto& js : manifest.at("subjects")) {
            Subject s;
            s.info.id = js.at("id").get<int>();
            s.info.split = js.at("split").get<std::string>();
            s.info.file = js.at("file").get<std::string>();
            s.info.params = js.at("params").get<PhantomParams>();
            const CktArchive archive = read_archive_file(dir / s.info.file);
            s.clean = to_cine(archive_get(archive, "clean"));
            check_arg(s.clean.t == ds.spec.t_frames && s.clean.h == ds.spec.grid_h &&
                          s.clean.w == ds.spec.grid_w,
                      "subject " + s.info.file + " does not match manifest grid");
            ds.subjects.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("manifest", 0, e.what());
    }
    return ds;
}

}  // namespace ck
