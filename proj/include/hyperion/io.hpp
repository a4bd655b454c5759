#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hyperion/core.hpp"
#include "hyperion/evaluator.hpp"
#include "hyperion/generator.hpp"
#include "hyperion/profiler.hpp"
#include "hyperion/simulator.hpp"

// File formats:
//   trace          line-oriented text, `<timestamp_ms>,<bandwidth_mbps>`,
//                  `#` comments, strictly increasing timestamps
//   frames         JSONL, one frame record per line; dense attention tensors
//                  live in binary sidecar files referenced by relative path
//   attention      sidecar binary: 8 little-endian uint32 header
//                  {magic, version, layers, heads, n, 0, 0, 0} followed by
//                  layers*heads*n*n little-endian float32, row-major
//   profiling      JSONL, one record per line
//   model/config   single JSON documents
//   outcomes       CSV with fixed column order:
//                  frame_id,latency_ms,deviation,offload_bytes,feasible,stale,q0..q{K-1}
namespace hyperion::io {

constexpr std::uint32_t kAttentionMagic = 0x48594154;  // "HYAT"
constexpr std::uint32_t kAttentionVersion = 1;

std::vector<TracePoint> load_trace(const std::string& path);
void save_trace(const std::vector<TracePoint>& trace, const std::string& path);

std::vector<FrameRecord> load_frames(const std::string& path);
/// Frames with dense tensors get one `<stem>_frame_<id>.attn` sidecar next
/// to the frames file.
void save_frames(const std::vector<FrameRecord>& frames, const std::string& path);

AttentionTensor load_attention(const std::string& path);
void save_attention(const AttentionTensor& tensor, const std::string& path);

std::vector<ProfilingRecord> load_profiling_records(const std::string& path);
void save_profiling_records(const std::vector<ProfilingRecord>& records, const std::string& path);

ProfilerModel load_model(const std::string& path);
void save_model(const ProfilerModel& model, const std::string& path);

SimConfig load_sim_config(const std::string& path);
void save_sim_config(const SimConfig& cfg, const std::string& path);

GeneratorSpec load_generator_spec(const std::string& path);
void save_generator_spec(const GeneratorSpec& spec, const std::string& path);

/// Per-frame detection lists keyed by frame_id. Accepts detections files
/// ({"frame_id":..,"detections":[[x1,y1,x2,y2,conf,source],..]}) and, for
/// convenience, frames files (their ground_truth lists).
std::map<std::int64_t, std::vector<Detection>> load_detections(const std::string& path);
void save_detections(const std::map<std::int64_t, std::vector<Detection>>& by_frame,
                     const std::string& path);

void write_outcomes_csv(const std::vector<FrameOutcome>& outcomes, int k,
                        double required_latency_ms, std::ostream& out);
void save_outcomes_csv(const std::vector<FrameOutcome>& outcomes, int k,
                       double required_latency_ms, const std::string& path);

std::string summary_to_json(const Summary& summary);
std::string format_summary_table(const Summary& summary, std::size_t frame_count);

}  // namespace hyperion::io
