// SPDX-License-Identifier: Apache-2.0
#include "opgen/dataset.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parallel.hpp"

namespace opgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void append_le(std::string& buf, T value) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    buf.append(bytes, sizeof(T));
}

template <class T>
T load_le(const char* p) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

void append_values(std::string& buf, const std::vector<double>& values, Precision p) {
    for (double v : values) {
        if (p == Precision::F32) {
            append_le(buf, static_cast<float>(v));
        } else {
            append_le(buf, v);
        }
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError(DatasetError::Kind::Io, "cannot open for writing: " + path.string());
    return out;
}

void check_stream(const std::ostream& out, const fs::path& path) {
    if (!out) throw DatasetError(DatasetError::Kind::Io, "write failed: " + path.string());
}

}  // namespace

std::string_view dtype_name(Precision p) { return p == Precision::F32 ? "float32" : "float64"; }

std::size_t element_size(Precision p) { return p == Precision::F32 ? 4 : 8; }

Precision precision_from_bits(int bits) {
    if (bits == 32) return Precision::F32;
    if (bits == 64) return Precision::F64;
    throw std::invalid_argument("precision must be 32 or 64");
}

std::string_view DatasetError::category() const {
    switch (kind_) {
        case Kind::Io: return "io";
        case Kind::MissingArrayFile: return "missing-array-file";
        case Kind::ShapeMismatch: return "shape-mismatch";
        case Kind::UnknownVersion: return "unknown-version";
        case Kind::InvalidManifest: return "invalid-manifest";
    }
    return "unknown";
}

std::uint64_t ArrayEntry::element_count() const {
    std::uint64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::size_t ArrayEntry::element_bytes() const {
    if (dtype == "float32" || dtype == "int32") return 4;
    if (dtype == "float64") return 8;
    throw DatasetError(DatasetError::Kind::InvalidManifest, "unsupported dtype '" + dtype + "' for " + name);
}

const ArrayEntry* DatasetManifest::find_array(std::string_view name) const {
    for (const auto& a : arrays) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

std::string DatasetManifest::to_json(bool with_timestamp) const {
    json j;
    j["version"] = version;
    j["generator"] = "opgen";
    j["operator"] = std::string(to_string(family));
    j["bc"] = std::string(to_string(bc));
    j["grid"] = {
        {"resolution", resolution},
        {"includes_boundary", includes_boundary},
        {"spacing", grid().spacing()},
        {"layout", "row-major, x index slowest"},
    };
    j["n_samples"] = n_samples;
    j["m_min"] = m_min;
    j["m_max"] = m_max;
    j["master_seed"] = master_seed;
    j["dtype"] = std::string(dtype_name(precision));
    j["byte_order"] = "little";
    json arr = json::array();
    for (const auto& a : arrays) {
        arr.push_back({{"name", a.name}, {"file", a.file}, {"dtype", a.dtype}, {"shape", a.shape}});
    }
    j["arrays"] = arr;
    j["status"] = status;
    if (with_timestamp) j["created_utc"] = created_utc;
    return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DatasetError(DatasetError::Kind::InvalidManifest, std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("version")) {
        throw DatasetError(DatasetError::Kind::InvalidManifest, "manifest lacks a top-level \"version\" key");
    }
    if (!j["version"].is_number_integer() || j["version"].get<int>() != kManifestVersion) {
        throw DatasetError(DatasetError::Kind::UnknownVersion,
                           "unknown manifest version " + j["version"].dump() + " (supported: " +
                               std::to_string(kManifestVersion) + ")");
    }
    try {
        DatasetManifest m;
        m.version = j.at("version").get<int>();
        m.family = parse_operator_family(j.at("operator").get<std::string>());
        m.bc = parse_boundary_condition(j.at("bc").get<std::string>());
        m.resolution = j.at("grid").at("resolution").get<std::size_t>();
        m.includes_boundary = j.at("grid").at("includes_boundary").get<bool>();
        m.n_samples = j.at("n_samples").get<std::uint64_t>();
        m.m_min = j.at("m_min").get<int>();
        m.m_max = j.at("m_max").get<int>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        const auto dtype = j.at("dtype").get<std::string>();
        if (dtype == "float32") {
            m.precision = Precision::F32;
        } else if (dtype == "float64") {
            m.precision = Precision::F64;
        } else {
            throw std::invalid_argument("unsupported dtype '" + dtype + "'");
        }
        for (const auto& a : j.at("arrays")) {
            m.arrays.push_back({a.at("name").get<std::string>(), a.at("file").get<std::string>(),
                                a.at("dtype").get<std::string>(),
                                a.at("shape").get<std::vector<std::uint64_t>>()});
        }
        m.status = j.value("status", std::string("complete"));
        m.created_utc = j.value("created_utc", std::string());
        return m;
    } catch (const DatasetError&) {
        throw;
    } catch (const std::exception& e) {
        throw DatasetError(DatasetError::Kind::InvalidManifest, std::string("malformed manifest: ") + e.what());
    }
}

SampleRecord make_sample_record(const GenerateOptions& opts, const TensorEvaluator& evaluator,
                                std::uint64_t index) {
    const RandomField field = opts.field_source ? opts.field_source(opts.spec, index)
                                                : sample_field(opts.spec, index);
    const Operator op = operator_for_sample(opts.family, opts.spec.master_seed, index);
    const FieldGrids g = evaluator.evaluate(field, required_derivatives(op));

    SampleRecord rec;
    rec.index = index;
    rec.truncation = field.truncation();
    rec.bc = field.bc();
    rec.family = opts.family;
    rec.u = g.u;
    rec.f = apply_on_grid(op, g, evaluator.xs(), evaluator.ys());

    if (opts.family == OperatorFamily::DivergenceParametric) {
        const CoefficientMatrix& A = std::get<DivergenceFormOperator>(op).A;
        rec.matrix_params = A.params();
        std::vector<double> alpha(g.nx * g.ny), delta(g.nx * g.ny);
        for (std::size_t i = 0; i < g.nx; ++i) {
            for (std::size_t j = 0; j < g.ny; ++j) {
                const MatrixEntries e = A.entries(evaluator.xs()[i], evaluator.ys()[j]);
                alpha[i * g.ny + j] = e.a11;
                delta[i * g.ny + j] = e.a22;
            }
        }
        rec.alpha = std::move(alpha);
        rec.delta = std::move(delta);
    }
    return rec;
}

DatasetManifest generate_dataset(const GenerateOptions& opts) {
    opts.spec.validate();
    if (opts.n_samples < 1) throw std::invalid_argument("dataset needs at least one sample");
    if (!opts.grid.includes_boundary()) throw std::invalid_argument("datasets are written on boundary-inclusive grids");

    const Grid& grid = opts.grid;
    const std::size_t s = grid.points();
    const std::uint64_t n = opts.n_samples;
    const bool parametric = opts.family == OperatorFamily::DivergenceParametric;
    const std::string dtype(dtype_name(opts.precision));

    DatasetManifest manifest;
    manifest.family = opts.family;
    manifest.bc = opts.spec.bc;
    manifest.resolution = grid.resolution();
    manifest.includes_boundary = grid.includes_boundary();
    manifest.n_samples = n;
    manifest.m_min = opts.spec.m_min;
    manifest.m_max = opts.spec.m_max;
    manifest.master_seed = opts.spec.master_seed;
    manifest.precision = opts.precision;
    manifest.arrays.push_back({"f", "f.bin", dtype, {n, s, s}});
    manifest.arrays.push_back({"u", "u.bin", dtype, {n, s, s}});
    if (parametric) {
        manifest.arrays.push_back({"alpha", "alpha.bin", dtype, {n, s, s}});
        manifest.arrays.push_back({"delta", "delta.bin", dtype, {n, s, s}});
        manifest.arrays.push_back({"matrix_params", "matrix_params.bin", "float64", {n, 4}});
    }
    manifest.arrays.push_back({"truncation", "truncation.bin", "int32", {n}});

    std::vector<fs::path> created;
    try {
        std::error_code dir_ec;
        fs::create_directories(opts.out_dir, dir_ec);
        if (dir_ec) {
            throw DatasetError(DatasetError::Kind::Io,
                               "cannot create output directory " + opts.out_dir.string() + ": " + dir_ec.message());
        }
        std::vector<std::ofstream> outs;
        for (const auto& a : manifest.arrays) {
            created.push_back(opts.out_dir / a.file);
            outs.push_back(open_output(created.back()));
        }

        const TensorEvaluator evaluator(opts.spec.bc, opts.spec.m_max, grid.coords(), grid.coords());
        const unsigned workers = detail::resolve_workers(opts.workers);
        const std::size_t batch = std::max<std::size_t>(1, opts.batch_size);

        std::vector<SampleRecord> records;
        std::vector<std::string> bufs(manifest.arrays.size());
        for (std::uint64_t start = 0; start < n; start += batch) {
            const std::size_t count = std::min<std::uint64_t>(batch, n - start);
            records.assign(count, SampleRecord{});
            detail::parallel_for(count, workers,
                         [&](std::size_t k) { records[k] = make_sample_record(opts, evaluator, start + k); });

            for (auto& b : bufs) b.clear();
            for (const auto& rec : records) {
                std::size_t slot = 0;
                append_values(bufs[slot++], rec.f, opts.precision);
                append_values(bufs[slot++], rec.u, opts.precision);
                if (parametric) {
                    append_values(bufs[slot++], *rec.alpha, opts.precision);
                    append_values(bufs[slot++], *rec.delta, opts.precision);
                    for (double p : rec.matrix_params) append_le(bufs[slot], p);
                    ++slot;
                }
                append_le(bufs[slot], static_cast<std::int32_t>(rec.truncation));
            }
            for (std::size_t a = 0; a < outs.size(); ++a) {
                outs[a].write(bufs[a].data(), std::streamsize(bufs[a].size()));
                check_stream(outs[a], created[a]);
            }
        }
        for (std::size_t a = 0; a < outs.size(); ++a) {
            outs[a].close();
            check_stream(outs[a], created[a]);
        }

        if (opts.write_npy) {
            for (const auto& a : manifest.arrays) {
                const fs::path npy = opts.out_dir / (a.name + ".npy");
                created.push_back(npy);
                write_npy_mirror(opts.out_dir / a.file, npy, a);
            }
        }

        manifest.created_utc = utc_timestamp();
        const fs::path manifest_path = opts.out_dir / "manifest.json";
        created.push_back(manifest_path);
        std::ofstream mout = open_output(manifest_path);
        mout << manifest.to_json();
        mout.close();
        check_stream(mout, manifest_path);
    } catch (...) {
        std::error_code ec;
        for (const auto& p : created) fs::remove(p, ec);
        throw;
    }
    return manifest;
}

DatasetReader::DatasetReader(const fs::path& manifest_path) : dir_(manifest_path.parent_path()) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw DatasetError(DatasetError::Kind::Io, "cannot open manifest: " + manifest_path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    manifest_ = DatasetManifest::from_json(ss.str());

    if (manifest_.status != "complete") {
        throw DatasetError(DatasetError::Kind::InvalidManifest,
                           "dataset marked '" + manifest_.status + "': " + manifest_path.string());
    }
    for (const char* required : {"f", "u", "truncation"}) {
        if (!manifest_.find_array(required)) {
            throw DatasetError(DatasetError::Kind::InvalidManifest,
                               std::string("manifest lacks required array '") + required + "'");
        }
    }
    for (const auto& a : manifest_.arrays) {
        const fs::path p = dir_ / a.file;
        std::error_code ec;
        if (!fs::is_regular_file(p, ec)) {
            throw DatasetError(DatasetError::Kind::MissingArrayFile, "missing array file: " + p.string());
        }
        const std::uint64_t expected = a.element_count() * a.element_bytes();
        const std::uint64_t actual = fs::file_size(p);
        if (actual != expected) {
            throw DatasetError(DatasetError::Kind::ShapeMismatch,
                               "shape mismatch: " + p.string() + " holds " + std::to_string(actual) +
                                   " bytes, manifest shape implies " + std::to_string(expected));
        }
        if (a.shape.empty() || a.shape.front() != manifest_.n_samples) {
            throw DatasetError(DatasetError::Kind::ShapeMismatch,
                               "shape mismatch: leading dimension of " + a.name + " differs from n_samples");
        }
    }
}

std::vector<double> DatasetReader::read_slab(const ArrayEntry& entry, std::uint64_t index) const {
    const std::uint64_t per = entry.element_count() / entry.shape.front();
    const std::size_t width = entry.element_bytes();
    const fs::path p = dir_ / entry.file;

    std::ifstream in(p, std::ios::binary);
    if (!in) throw DatasetError(DatasetError::Kind::Io, "cannot open " + p.string());
    std::string raw(per * width, '\0');
    in.seekg(std::streamoff(index * per * width));
    in.read(raw.data(), std::streamsize(raw.size()));
    if (!in) throw DatasetError(DatasetError::Kind::ShapeMismatch, "truncated read from " + p.string());

    std::vector<double> out(per);
    for (std::uint64_t k = 0; k < per; ++k) {
        const char* at = raw.data() + k * width;
        if (entry.dtype == "float32") {
            out[k] = load_le<float>(at);
        } else if (entry.dtype == "float64") {
            out[k] = load_le<double>(at);
        } else {
            out[k] = load_le<std::int32_t>(at);
        }
    }
    return out;
}

SampleRecord DatasetReader::read(std::uint64_t index) const {
    if (index >= size()) throw std::out_of_range("sample index beyond dataset size");
    SampleRecord rec;
    rec.index = index;
    rec.bc = manifest_.bc;
    rec.family = manifest_.family;
    rec.f = read_slab(*manifest_.find_array("f"), index);
    rec.u = read_slab(*manifest_.find_array("u"), index);
    rec.truncation = static_cast<int>(read_slab(*manifest_.find_array("truncation"), index).front());
    if (const auto* a = manifest_.find_array("alpha")) rec.alpha = read_slab(*a, index);
    if (const auto* d = manifest_.find_array("delta")) rec.delta = read_slab(*d, index);
    if (const auto* m = manifest_.find_array("matrix_params")) {
        const auto v = read_slab(*m, index);
        std::copy_n(v.begin(), 4, rec.matrix_params.begin());
    }
    return rec;
}

namespace {

void write_npy_header(std::ostream& out, std::string_view descr, const std::vector<std::uint64_t>& shape) {
    std::string dims;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (k > 0) dims += ", ";
        dims += std::to_string(shape[k]);
    }
    if (shape.size() == 1) dims += ",";
    std::string header = "{'descr': '" + std::string(descr) + "', 'fortran_order': False, 'shape': (" + dims + "), }";
    // magic(6) + version(2) + header_len(2) + header + '\n', padded to a multiple of 64
    const std::size_t unpadded = 10 + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header.push_back('\n');

    out.write("\x93NUMPY\x01\x00", 8);
    std::string len;
    append_le(len, static_cast<std::uint16_t>(header.size()));
    out.write(len.data(), 2);
    out.write(header.data(), std::streamsize(header.size()));
}

std::string_view npy_descr(const std::string& dtype) {
    if (dtype == "float32") return "<f4";
    if (dtype == "float64") return "<f8";
    return "<i4";
}

}  // namespace

void write_npy(const fs::path& path, std::string_view descr, const std::vector<std::uint64_t>& shape,
               std::span<const char> raw_bytes) {
    std::ofstream out = open_output(path);
    write_npy_header(out, descr, shape);
    out.write(raw_bytes.data(), std::streamsize(raw_bytes.size()));
    out.close();
    check_stream(out, path);
}

void write_npy_mirror(const fs::path& raw_path, const fs::path& npy_path, const ArrayEntry& entry) {
    std::ifstream in(raw_path, std::ios::binary);
    if (!in) throw DatasetError(DatasetError::Kind::Io, "cannot open " + raw_path.string());
    std::ofstream out = open_output(npy_path);
    write_npy_header(out, npy_descr(entry.dtype), entry.shape);
    out << in.rdbuf();
    out.close();
    check_stream(out, npy_path);
}

}  // namespace opgen
