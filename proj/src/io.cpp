#include "ofbvr/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ofbvr::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_in(const std::string& path, bool binary = true) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = true) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IoError("truncated binary file");
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

float get_f32(std::istream& in) {
  std::uint32_t bits = get_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void expect_magic(std::istream& in, const char* magic,
                  const std::string& what) {
  char buf[4];
  in.read(buf, 4);
  if (!in || std::memcmp(buf, magic, 4) != 0)
    throw IoError("bad magic, not a " + what + " file");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---- frames ----

Frame read_pgm(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError("not a binary PGM (P5): " + path);
  auto next_token = [&in, &path]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("truncated PGM header: " + path);
  };
  int w = std::stoi(next_token());
  int h = std::stoi(next_token());
  int maxval = std::stoi(next_token());
  if (maxval != 255) throw IoError("PGM maxval must be 255: " + path);
  in.get();  // single whitespace after header
  Frame frame(w, h);
  in.read(reinterpret_cast<char*>(frame.pixels.cells.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (!in) throw IoError("truncated PGM pixel data: " + path);
  return frame;
}

void write_pgm(const Frame& frame, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "P5\n" << frame.width() << " " << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.cells.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw IoError("write failed: " + path);
}

Frame read_raw_frame(const std::string& path) {
  std::ifstream dims = open_in(path + ".dim", false);
  int w = 0, h = 0;
  dims >> w >> h;
  if (!dims || w <= 0 || h <= 0)
    throw IoError("bad sidecar dimensions header: " + path + ".dim");
  std::ifstream in = open_in(path);
  Frame frame(w, h);
  in.read(reinterpret_cast<char*>(frame.pixels.cells.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (!in) throw IoError("truncated raw frame: " + path);
  return frame;
}

void write_raw_frame(const Frame& frame, const std::string& path) {
  {
    std::ofstream dims = open_out(path + ".dim", false);
    dims << frame.width() << " " << frame.height() << "\n";
  }
  std::ofstream out = open_out(path);
  out.write(reinterpret_cast<const char*>(frame.pixels.cells.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw IoError("write failed: " + path);
}

Frame read_frame(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".pgm")
    return read_pgm(path);
  return read_raw_frame(path);
}

// ---- float-grid binaries ----

void write_flow(const FlowField& flow, const std::string& path) {
  std::ofstream out = open_out(path);
  out.write("OFBF", 4);
  put_u32(out, static_cast<std::uint32_t>(flow.width));
  put_u32(out, static_cast<std::uint32_t>(flow.height));
  put_u32(out, 0);
  for (const Vec2& v : flow.cells) {
    put_f32(out, static_cast<float>(v.dx));
    put_f32(out, static_cast<float>(v.dy));
  }
  if (!out) throw IoError("write failed: " + path);
}

FlowField read_flow(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, "OFBF", "flow");
  int w = static_cast<int>(get_u32(in));
  int h = static_cast<int>(get_u32(in));
  get_u32(in);  // reserved
  FlowField flow(w, h);
  for (Vec2& v : flow.cells) {
    v.dx = get_f32(in);
    v.dy = get_f32(in);
  }
  return flow;
}

void write_scalar_map(const ScalarMap& map, const std::string& path) {
  std::ofstream out = open_out(path);
  out.write("OFBJ", 4);
  put_u32(out, static_cast<std::uint32_t>(map.width));
  put_u32(out, static_cast<std::uint32_t>(map.height));
  put_u32(out, 0);
  for (double v : map.cells) put_f32(out, static_cast<float>(v));
  if (!out) throw IoError("write failed: " + path);
}

ScalarMap read_scalar_map(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, "OFBJ", "scalar map");
  int w = static_cast<int>(get_u32(in));
  int h = static_cast<int>(get_u32(in));
  get_u32(in);
  ScalarMap map(w, h);
  for (double& v : map.cells) v = get_f32(in);
  return map;
}

// ---- traces ----

BandwidthTrace read_bw_csv(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file: " + path);
  BandwidthTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, bps;
    if (std::sscanf(line.c_str(), "%lf,%lf", &t, &bps) != 2)
      throw IoError("bad bandwidth CSV line: " + line);
    trace.samples.push_back({t, bps});
  }
  trace.validate();
  return trace;
}

void write_bw_csv(const BandwidthTrace& trace, const std::string& path) {
  std::ofstream out = open_out(path, false);
  out << "t_seconds,throughput_bps\n";
  for (const auto& s : trace.samples)
    out << fmt_double(s.t) << "," << fmt_double(s.bps) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

ViewpointTrace read_vp_csv(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file: " + path);
  ViewpointTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, yaw, pitch;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &yaw, &pitch) != 3)
      throw IoError("bad viewpoint CSV line: " + line);
    trace.samples.push_back({t, yaw, pitch, 0.0, 0.0});
  }
  trace.validate();
  return trace;
}

void write_vp_csv(const ViewpointTrace& trace, const std::string& path) {
  std::ofstream out = open_out(path, false);
  out << "t_seconds,yaw_deg,pitch_deg\n";
  for (const auto& s : trace.samples)
    out << fmt_double(s.t) << "," << fmt_double(s.yaw) << ","
        << fmt_double(s.pitch) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

// ---- JSON documents ----

namespace {

ordered_json layout_json(const TileLayout& layout) {
  ordered_json j;
  j["rows"] = layout.rows;
  j["cols"] = layout.cols;
  j["K"] = layout.k;
  ordered_json rects = ordered_json::array();
  for (const TileRect& r : layout.rects)
    rects.push_back({{"x1", r.x1}, {"x2", r.x2}, {"y1", r.y1}, {"y2", r.y2}});
  j["rects"] = std::move(rects);
  return j;
}

TileLayout layout_from(const ordered_json& j) {
  TileLayout layout;
  layout.rows = j.at("rows").get<int>();
  layout.cols = j.at("cols").get<int>();
  layout.k = j.at("K").get<int>();
  for (const auto& r : j.at("rects"))
    layout.rects.push_back(TileRect{r.at("x1").get<int>(), r.at("x2").get<int>(),
                                    r.at("y1").get<int>(), r.at("y2").get<int>()});
  layout.validate();
  return layout;
}

ordered_json grid_scores_json(const TileScoreGrid& grid,
                              const std::vector<double>& flat) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < grid.rows; ++r) {
    ordered_json cols = ordered_json::array();
    for (int c = 0; c < grid.cols; ++c) {
      ordered_json levels = ordered_json::array();
      for (int l = 0; l < grid.n_levels; ++l)
        levels.push_back(flat[grid.idx(r, c, l)]);
      cols.push_back(std::move(levels));
    }
    rows.push_back(std::move(cols));
  }
  return rows;
}

std::vector<double> grid_scores_from(const ordered_json& rows, int nr, int nc,
                                     int nl) {
  std::vector<double> flat(static_cast<std::size_t>(nr) * nc * nl, 0.0);
  if (static_cast<int>(rows.size()) != nr)
    throw IoError("grid row count mismatch");
  std::size_t i = 0;
  for (const auto& cols : rows) {
    if (static_cast<int>(cols.size()) != nc)
      throw IoError("grid column count mismatch");
    for (const auto& levels : cols) {
      if (static_cast<int>(levels.size()) != nl)
        throw IoError("grid level count mismatch");
      for (const auto& v : levels) flat[i++] = v.get<double>();
    }
  }
  return flat;
}

ordered_json grid_json(const TileScoreGrid& grid, const QualityLadder& ladder) {
  ordered_json j;
  j["version"] = 1;
  j["rows"] = grid.rows;
  j["cols"] = grid.cols;
  j["levels"] = ladder.labels;
  j["scores"] = grid_scores_json(grid, grid.scores);
  j["sizes"] = grid_scores_json(grid, grid.sizes);
  return j;
}

TileScoreGrid grid_from(const ordered_json& j, QualityLadder* ladder_out) {
  QualityLadder ladder;
  ladder.labels = j.at("levels").get<std::vector<std::string>>();
  ladder.validate();
  TileScoreGrid grid(j.at("rows").get<int>(), j.at("cols").get<int>(),
                     ladder.levels());
  grid.scores =
      grid_scores_from(j.at("scores"), grid.rows, grid.cols, grid.n_levels);
  grid.sizes =
      grid_scores_from(j.at("sizes"), grid.rows, grid.cols, grid.n_levels);
  if (ladder_out) *ladder_out = ladder;
  return grid;
}

}  // namespace

std::string layout_to_json(const TileLayout& layout) {
  return layout_json(layout).dump(2) + "\n";
}

TileLayout layout_from_json(const std::string& text) {
  return layout_from(ordered_json::parse(text));
}

std::string grid_to_json(const TileScoreGrid& grid, const QualityLadder& ladder) {
  return grid_json(grid, ladder).dump(2) + "\n";
}

TileScoreGrid grid_from_json(const std::string& text, QualityLadder* ladder) {
  return grid_from(ordered_json::parse(text), ladder);
}

std::string manifest_to_json(const VideoManifest& manifest) {
  ordered_json j;
  j["format"] = "ofbvr-manifest";
  j["version"] = 1;
  j["video_id"] = manifest.video_id;
  j["chunk_count"] = manifest.chunk_count;
  j["chunk_duration"] = manifest.chunk_duration;
  j["levels"] = manifest.ladder.labels;
  j["layout"] = layout_json(manifest.layout);
  ordered_json chunks = ordered_json::array();
  for (const ChunkScores& cs : manifest.chunks) {
    ordered_json c;
    c["scores"] = grid_scores_json(cs.perceptual, cs.perceptual.scores);
    c["plain_scores"] = grid_scores_json(cs.perceptual, cs.plain_scores);
    c["sizes"] = grid_scores_json(cs.perceptual, cs.perceptual.sizes);
    chunks.push_back(std::move(c));
  }
  j["chunks"] = std::move(chunks);
  return j.dump() + "\n";
}

VideoManifest manifest_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  if (j.value("format", "") != "ofbvr-manifest")
    throw IoError("not a manifest document");
  VideoManifest m;
  m.video_id = j.at("video_id").get<std::string>();
  m.chunk_count = j.at("chunk_count").get<int>();
  m.chunk_duration = j.at("chunk_duration").get<double>();
  m.ladder.labels = j.at("levels").get<std::vector<std::string>>();
  m.layout = layout_from(j.at("layout"));
  for (const auto& c : j.at("chunks")) {
    ChunkScores cs;
    cs.perceptual =
        TileScoreGrid(m.layout.rows, m.layout.cols, m.ladder.levels());
    cs.perceptual.scores = grid_scores_from(c.at("scores"), m.layout.rows,
                                            m.layout.cols, m.ladder.levels());
    cs.perceptual.sizes = grid_scores_from(c.at("sizes"), m.layout.rows,
                                           m.layout.cols, m.ladder.levels());
    cs.plain_scores = grid_scores_from(c.at("plain_scores"), m.layout.rows,
                                       m.layout.cols, m.ladder.levels());
    m.chunks.push_back(std::move(cs));
  }
  m.validate();
  return m;
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out = open_out(path, false);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- policy parameters ----

namespace {

constexpr std::uint32_t kParamsVersion = 1;

struct TensorRef {
  std::vector<std::uint32_t> shape;
  const std::vector<double>* data;
};

void net_tensors(const nn::Net& net, std::vector<TensorRef>& out) {
  const nn::NetConfig& c = net.cfg;
  for (int h = 0; h < c.n_history; ++h) {
    out.push_back({{static_cast<std::uint32_t>(c.conv_filters),
                    static_cast<std::uint32_t>(c.conv_width)},
                   &net.conv_w[h]});
    out.push_back({{static_cast<std::uint32_t>(c.conv_filters)},
                   &net.conv_b[h]});
  }
  for (int s = 0; s < c.n_scalars; ++s) {
    out.push_back({{static_cast<std::uint32_t>(c.scalar_units)}, &net.scal_w[s]});
    out.push_back({{static_cast<std::uint32_t>(c.scalar_units)}, &net.scal_b[s]});
  }
  out.push_back({{static_cast<std::uint32_t>(c.outputs),
                  static_cast<std::uint32_t>(c.concat_size())},
                 &net.out_w});
  out.push_back({{static_cast<std::uint32_t>(c.outputs)}, &net.out_b});
}

struct LoadedTensor {
  std::vector<std::uint32_t> shape;
  std::vector<double> data;
};

// Rebuilds a network from the layer sequence: (2D,1D) conv-head pairs,
// (1D,1D) scalar-head pairs, then the (2D,1D) output pair.
nn::Net net_from_tensors(const std::vector<LoadedTensor>& layers) {
  if (layers.size() < 2 || layers.size() % 2 != 0)
    throw IoError("malformed parameter layer sequence");
  std::size_t n_pairs = layers.size() / 2;
  std::size_t n_heads = n_pairs - 1;

  std::size_t conv_heads = 0;
  while (conv_heads < n_heads && layers[2 * conv_heads].shape.size() == 2)
    ++conv_heads;
  std::size_t scalar_heads = n_heads - conv_heads;

  nn::NetConfig cfg;
  cfg.n_history = static_cast<int>(conv_heads);
  cfg.n_scalars = static_cast<int>(scalar_heads);
  const LoadedTensor& out_w = layers[2 * n_heads];
  const LoadedTensor& out_b = layers[2 * n_heads + 1];
  if (out_w.shape.size() != 2 || out_b.shape.size() != 1)
    throw IoError("malformed output layer shapes");
  cfg.outputs = static_cast<int>(out_w.shape[0]);

  if (conv_heads > 0) {
    cfg.conv_filters = static_cast<int>(layers[0].shape[0]);
    cfg.conv_width = static_cast<int>(layers[0].shape[1]);
  }
  cfg.scalar_units = scalar_heads > 0
                         ? static_cast<int>(layers[2 * conv_heads].shape[0])
                         : 0;
  // history length from the concat width
  int concat = static_cast<int>(out_w.shape[1]);
  int scal_total = cfg.n_scalars * cfg.scalar_units;
  if (conv_heads > 0) {
    int conv_total = concat - scal_total;
    int per_head = conv_total / cfg.n_history;
    int t = per_head / cfg.conv_filters;
    cfg.history_len = t + cfg.conv_width - 1;
    if (cfg.concat_size() != concat)
      throw IoError("inconsistent parameter shapes");
  } else {
    cfg.history_len = cfg.conv_width;
  }

  nn::Net net = nn::Net::zeros(cfg);
  std::vector<TensorRef> refs;
  net_tensors(net, refs);
  std::vector<std::vector<double>*> slots;
  for (int h = 0; h < cfg.n_history; ++h) {
    slots.push_back(&net.conv_w[h]);
    slots.push_back(&net.conv_b[h]);
  }
  for (int s = 0; s < cfg.n_scalars; ++s) {
    slots.push_back(&net.scal_w[s]);
    slots.push_back(&net.scal_b[s]);
  }
  slots.push_back(&net.out_w);
  slots.push_back(&net.out_b);
  if (slots.size() != layers.size())
    throw IoError("parameter layer count mismatch");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (refs[i].shape != layers[i].shape)
      throw IoError("parameter tensor shape mismatch");
    *slots[i] = layers[i].data;
  }
  return net;
}

}  // namespace

void write_params(const PolicyParams& params, const std::string& path) {
  std::vector<TensorRef> tensors;
  net_tensors(params.actor, tensors);
  net_tensors(params.critic, tensors);

  std::ofstream out = open_out(path);
  out.write("OFBP", 4);
  put_u32(out, kParamsVersion);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const TensorRef& t : tensors) {
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    std::size_t n = 1;
    for (std::uint32_t d : t.shape) {
      put_u32(out, d);
      n *= d;
    }
    if (n != t.data->size()) throw IoError("tensor shape/data mismatch");
    for (double v : *t.data) put_f32(out, static_cast<float>(v));
  }
  if (!out) throw IoError("write failed: " + path);
}

PolicyParams read_params(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, "OFBP", "policy parameters");
  std::uint32_t version = get_u32(in);
  if (version != kParamsVersion) throw IoError("unsupported params version");
  std::uint32_t n_layers = get_u32(in);
  if (n_layers % 2 != 0) throw IoError("odd parameter layer count");

  std::vector<LoadedTensor> layers(n_layers);
  for (auto& t : layers) {
    std::uint32_t rank = get_u32(in);
    if (rank < 1 || rank > 2) throw IoError("unsupported tensor rank");
    std::size_t n = 1;
    t.shape.resize(rank);
    for (auto& d : t.shape) {
      d = get_u32(in);
      n *= d;
    }
    t.data.resize(n);
    for (double& v : t.data) v = get_f32(in);
  }

  std::size_t half = n_layers / 2;
  PolicyParams params;
  params.actor = net_from_tensors(
      std::vector<LoadedTensor>(layers.begin(), layers.begin() + half));
  params.critic = net_from_tensors(
      std::vector<LoadedTensor>(layers.begin() + half, layers.end()));
  return params;
}

// ---- logs ----

void write_session_csv(const SessionLog& log, const std::string& path) {
  std::ofstream out = open_out(path, false);
  out << "chunk,core_level,surround_level,outside_level,budget_core,"
         "budget_surround,budget_outside,bytes,download_s,rebuffer_s,"
         "psnr_of,outside_miss_ratio,buffer_after,reward\n";
  for (const ChunkRecord& r : log.chunks) {
    out << r.chunk << "," << r.action.core << "," << r.action.surround << ","
        << r.action.outside << "," << fmt_double(r.area_budgets[0]) << ","
        << fmt_double(r.area_budgets[1]) << "," << fmt_double(r.area_budgets[2])
        << "," << fmt_double(r.bytes) << "," << fmt_double(r.outcome.download_s)
        << "," << fmt_double(r.outcome.rebuffer_s) << ","
        << fmt_double(r.outcome.psnr_of) << ","
        << fmt_double(r.outcome.outside_miss_ratio) << ","
        << fmt_double(r.buffer_after) << "," << fmt_double(r.reward) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::string session_summary_json(const SessionLog& log,
                                 const std::string& video_id) {
  ordered_json j;
  j["video_id"] = video_id;
  j["chunks"] = log.chunks.size();
  j["wall_s"] = log.wall_s;
  j["playback_s"] = log.playback_s;
  j["startup_delay_s"] = log.startup_delay_s;
  j["rebuffer_s"] = log.rebuffer_s;
  j["rebuffer_ratio"] = log.rebuffer_ratio;
  j["mean_psnr_of"] = log.mean_psnr_of;
  j["total_reward"] = log.total_reward;
  return j.dump(2) + "\n";
}

void write_training_log_csv(const std::vector<EpisodeStats>& log,
                            const std::string& path) {
  std::ofstream out = open_out(path, false);
  out << "episode,mean_reward,actor_loss,critic_loss,entropy\n";
  for (const EpisodeStats& e : log)
    out << e.episode << "," << fmt_double(e.mean_reward) << ","
        << fmt_double(e.actor_loss) << "," << fmt_double(e.critic_loss) << ","
        << fmt_double(e.entropy) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace ofbvr::io
