#include "maskvid/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "maskvid/errors.hpp"
#include "maskvid/kvconfig.hpp"

namespace maskvid {

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot write " + path.string());
  }

  void magic(const char m[4]) { out_.write(m, 4); }

  void u32(std::uint32_t v) {
    const std::array<char, 4> b = {
        static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
        static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out_.write(b.data(), 4);
  }

  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  void close() {
    out_.flush();
    if (!out_) throw IoError("short write to " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path.string());
  }

  void expect_magic(const char m[4]) {
    char got[4] = {};
    read(got, 4);
    if (std::memcmp(got, m, 4) != 0)
      throw IoError(path_.string() + ": wrong file magic");
  }

  std::uint32_t u32() {
    unsigned char b[4];
    read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  float f32() { return std::bit_cast<float>(u32()); }

  void expect_eof() {
    char c;
    if (in_.read(&c, 1))
      throw IoError(path_.string() + ": trailing bytes after payload");
  }

 private:
  void read(char* dst, std::streamsize n) {
    if (!in_.read(dst, n))
      throw IoError(path_.string() + ": truncated file");
  }

  std::filesystem::path path_;
  std::ifstream in_;
};

constexpr std::uint32_t kFormatVersion = 1;

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffull) throw IoError(std::string(what) + " too large for file format");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_video(const std::filesystem::path& path, const VideoTensor& video) {
  video.validate();
  ByteWriter w(path);
  w.magic("MGVD");
  w.u32(kFormatVersion);
  w.u32(checked_u32(video.t_frames, "t"));
  w.u32(checked_u32(video.height, "h"));
  w.u32(checked_u32(video.width, "w"));
  w.u32(checked_u32(video.channels, "c"));
  for (float v : video.data) w.f32(v);
  w.close();
}

VideoTensor read_video(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic("MGVD");
  if (r.u32() != kFormatVersion)
    throw IoError(path.string() + ": unsupported version");
  const std::uint32_t t = r.u32(), h = r.u32(), w = r.u32(), c = r.u32();
  VideoTensor video(static_cast<int>(t), static_cast<int>(h),
                    static_cast<int>(w), static_cast<int>(c));
  for (float& v : video.data) v = r.f32();
  r.expect_eof();
  try {
    video.validate();
  } catch (const std::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return video;
}

void write_tokens(const std::filesystem::path& path, const TokenGrid& grid,
                  std::uint32_t v_vis) {
  if (grid.ids.size() != grid.shape.n_tokens())
    throw DimensionError("token grid size does not match its shape");
  for (std::uint32_t id : grid.ids)
    if (id >= v_vis) throw VocabError("token id out of range for file");
  ByteWriter w(path);
  w.magic("MGTK");
  w.u32(kFormatVersion);
  w.u32(checked_u32(grid.shape.t_lat, "t_lat"));
  w.u32(checked_u32(grid.shape.h_lat, "h_lat"));
  w.u32(checked_u32(grid.shape.w_lat, "w_lat"));
  w.u32(v_vis);
  for (std::uint32_t id : grid.ids) w.u32(id);
  w.close();
}

TokenFile read_tokens(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic("MGTK");
  if (r.u32() != kFormatVersion)
    throw IoError(path.string() + ": unsupported version");
  TokenFile tf;
  tf.t_lat = r.u32();
  tf.h_lat = r.u32();
  tf.w_lat = r.u32();
  tf.v_vis = r.u32();
  const std::size_t n = static_cast<std::size_t>(tf.t_lat) * tf.h_lat * tf.w_lat;
  tf.ids.resize(n);
  for (std::uint32_t& id : tf.ids) {
    id = r.u32();
    if (id >= tf.v_vis) throw IoError(path.string() + ": token id out of range");
  }
  r.expect_eof();
  return tf;
}

void write_codebook(const std::filesystem::path& path, const Codebook& cb) {
  if (cb.centroids.size() != static_cast<std::size_t>(cb.v_vis) * cb.dim)
    throw DimensionError("codebook payload size mismatch");
  ByteWriter w(path);
  w.magic("MGCB");
  w.u32(kFormatVersion);
  w.u32(cb.v_vis);
  w.u32(cb.dim);
  for (double v : cb.centroids) w.f32(static_cast<float>(v));
  w.close();
}

Codebook read_codebook(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic("MGCB");
  if (r.u32() != kFormatVersion)
    throw IoError(path.string() + ": unsupported version");
  Codebook cb;
  cb.v_vis = r.u32();
  cb.dim = r.u32();
  cb.centroids.resize(static_cast<std::size_t>(cb.v_vis) * cb.dim);
  for (double& v : cb.centroids) {
    v = r.f32();
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw IoError(path.string() + ": centroid value outside [0, 1]");
  }
  r.expect_eof();
  return cb;
}

void write_params(const std::filesystem::path& path, const PottsParams& params) {
  params.check_finite();
  ByteWriter w(path);
  w.magic("MGPT");
  w.u32(kFormatVersion);
  w.u32(params.v_vis);
  w.u32(params.n_positions);
  w.u32(params.n_classes);
  for (const std::vector<double>* block :
       {&params.neighbor, &params.positional, &params.task_bias,
        &params.class_bias})
    for (double v : *block) w.f32(static_cast<float>(v));
  w.close();
}

PottsParams read_params(const std::filesystem::path& path) {
  ByteReader r(path);
  r.expect_magic("MGPT");
  if (r.u32() != kFormatVersion)
    throw IoError(path.string() + ": unsupported version");
  const std::uint32_t v_vis = r.u32();
  const std::uint32_t n = r.u32();
  const std::uint32_t n_classes = r.u32();
  if (v_vis == 0 || n == 0)
    throw IoError(path.string() + ": degenerate parameter geometry");
  PottsParams params = PottsParams::zeros(v_vis, n, n_classes);
  for (std::vector<double>* block :
       {&params.neighbor, &params.positional, &params.task_bias,
        &params.class_bias})
    for (double& v : *block) v = r.f32();
  r.expect_eof();
  try {
    params.check_finite();
  } catch (const std::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return params;
}

void write_labels(const std::filesystem::path& path,
                  std::span<const std::uint32_t> labels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << i << "," << labels[i] << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<std::uint32_t> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "index,label")
    throw IoError(path.string() + ": bad labels header");
  std::vector<std::uint32_t> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(path.string() + ": bad labels row");
    const std::uint64_t index = parse_u64(line.substr(0, comma));
    if (index != labels.size())
      throw IoError(path.string() + ": labels out of order");
    labels.push_back(static_cast<std::uint32_t>(parse_u64(line.substr(comma + 1))));
  }
  return labels;
}

void write_loss_curve(const std::filesystem::path& path,
                      std::span<const LossBreakdown> curve) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "step,total,refine,mask,recons,n_refine,n_mask,n_recons\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const LossBreakdown& lb = curve[i];
    out << i << "," << format_double(lb.total) << "," << format_double(lb.refine)
        << "," << format_double(lb.mask_part) << "," << format_double(lb.recons)
        << "," << lb.n_refine << "," << lb.n_mask << "," << lb.n_recons << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<LossBreakdown> read_loss_curve(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "step,total,refine,mask,recons,n_refine,n_mask,n_recons")
    throw IoError(path.string() + ": bad loss curve header");
  std::vector<LossBreakdown> curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_list(line);
    if (cells.size() != 8) throw IoError(path.string() + ": bad loss curve row");
    LossBreakdown lb;
    lb.total = parse_double(cells[1]);
    lb.refine = parse_double(cells[2]);
    lb.mask_part = parse_double(cells[3]);
    lb.recons = parse_double(cells[4]);
    lb.n_refine = static_cast<std::size_t>(parse_u64(cells[5]));
    lb.n_mask = static_cast<std::size_t>(parse_u64(cells[6]));
    lb.n_recons = static_cast<std::size_t>(parse_u64(cells[7]));
    curve.push_back(lb);
  }
  return curve;
}

void write_fit_report(const std::filesystem::path& path,
                      const FitReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iteration,distortion\n";
  for (std::size_t i = 0; i < report.distortion_per_iter.size(); ++i)
    out << i << "," << format_double(report.distortion_per_iter[i]) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace maskvid
