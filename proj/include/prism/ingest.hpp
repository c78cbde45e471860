#pragma once

#include <span>
#include <string>
#include <vector>

#include "prism/types.hpp"

namespace prism::ingest {

struct VideoSource {
  enum class Kind { video_file, image_directory };
  Kind kind = Kind::image_directory;
  std::string path;
  double fps = 1.0;
};

struct IngestOptions {
  int jpeg_quality = 90;
  // Longer-side resize applied to stills before they enter the pipeline;
  // 0 means no resize.
  int resize = 0;
  // Subprocess template used for video containers. Placeholders: {input},
  // {fps}, {pattern}. The default expects an ffmpeg-compatible decoder on
  // PATH; image directories never touch it.
  std::string decoder_cmd =
      "ffmpeg -nostdin -v error -i {input} -vf fps={fps} -start_number 0 -q:v 2 {pattern}";
};

// Decodes the source into <out_dir>/frames/%06d.jpg and returns the ordered
// frame records (timestamps index/fps). Image directories are consumed in
// lexicographic filename order.
std::vector<FrameRecord> extract_frames(const VideoSource& source, const std::string& out_dir,
                                        const IngestOptions& options = {});

// SRT, WebVTT or plain-text transcripts. Plain text becomes one untimed
// segment; an empty file yields an empty transcript.
Transcript load_transcript(const std::string& path);

void write_frames_manifest(const std::string& path, std::span<const FrameRecord> frames);
std::vector<FrameRecord> read_frames_manifest(const std::string& path);

void write_transcript_json(const std::string& path, const Transcript& transcript);
Transcript read_transcript_json(const std::string& path);

}  // namespace prism::ingest
