#pragma once

#include <string>
#include <vector>

#include "ofbvr/abr.hpp"
#include "ofbvr/manifest.hpp"
#include "ofbvr/sim.hpp"

namespace ofbvr::io {

// ---- frames ----
// Binary portable graymap, P5, maxval 255.
Frame read_pgm(const std::string& path);
void write_pgm(const Frame& frame, const std::string& path);
// Raw row-major 8-bit pixels; dimensions live in a "<path>.dim" sidecar
// holding "width height".
Frame read_raw_frame(const std::string& path);
void write_raw_frame(const Frame& frame, const std::string& path);
// Dispatches on the .pgm extension, otherwise raw+sidecar.
Frame read_frame(const std::string& path);

// ---- float-grid binaries ----
// 16-byte header (magic, u32 width, u32 height, u32 reserved), then
// little-endian f32 data. Flow files ("OFBF") hold dx,dy pairs; scalar maps
// ("OFBJ") one channel.
void write_flow(const FlowField& flow, const std::string& path);
FlowField read_flow(const std::string& path);
void write_scalar_map(const ScalarMap& map, const std::string& path);
ScalarMap read_scalar_map(const std::string& path);

// ---- traces ----
BandwidthTrace read_bw_csv(const std::string& path);
void write_bw_csv(const BandwidthTrace& trace, const std::string& path);
ViewpointTrace read_vp_csv(const std::string& path);
void write_vp_csv(const ViewpointTrace& trace, const std::string& path);

// ---- JSON documents ----
std::string layout_to_json(const TileLayout& layout);
TileLayout layout_from_json(const std::string& text);
std::string grid_to_json(const TileScoreGrid& grid, const QualityLadder& ladder);
TileScoreGrid grid_from_json(const std::string& text, QualityLadder* ladder = nullptr);
std::string manifest_to_json(const VideoManifest& manifest);
VideoManifest manifest_from_json(const std::string& text);

void write_text(const std::string& text, const std::string& path);
std::string read_text(const std::string& path);

// ---- policy parameters ("OFBP") ----
void write_params(const PolicyParams& params, const std::string& path);
PolicyParams read_params(const std::string& path);

// ---- logs ----
void write_session_csv(const SessionLog& log, const std::string& path);
std::string session_summary_json(const SessionLog& log,
                                 const std::string& video_id);
void write_training_log_csv(const std::vector<EpisodeStats>& log,
                            const std::string& path);

}  // namespace ofbvr::io
