#pragma once

#include <iosfwd>
#include <string>

#include "rflow/flow.hpp"
#include "rflow/image.hpp"

namespace rflow {

// PNG, 8-bit. Palette images expand to RGB; 16-bit depth and alpha are
// reduced/stripped. Result has 1 or 3 channels.
Image8 read_png(const std::string& path);

// PGM (P5 binary or P2 ascii), maxval <= 255.
Image8 read_pgm(const std::string& path);

// 8-bit PNG: grayscale for 1-channel, RGB for 3-channel images.
void write_png(const Image8& image, const std::string& path);

// Grayscale PNG of a float frame: values clamped to [0, 255], rounded half
// away from zero.
void write_png(const Frame& frame, const std::string& path);

// Binary PGM (P5) of a 1-channel image.
void write_pgm(const Image8& image, const std::string& path);

struct LoadedFrame {
    Frame frame;
    bool was_color = false;  // true when a 3-channel input was luma-converted
};

// Loads a .png or .pgm by extension and converts to a grayscale Frame.
LoadedFrame load_frame(const std::string& path);

// Middlebury .flo: float magic 202021.25, int32 width, int32 height, then
// height*width interleaved (u, v) float32, all little-endian.
void write_flo(const FlowField& flow, std::ostream& out);
void write_flo(const FlowField& flow, const std::string& path);
FlowField read_flo(std::istream& in);
FlowField read_flo(const std::string& path);

}  // namespace rflow
