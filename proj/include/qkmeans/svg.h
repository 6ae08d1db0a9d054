// Copyright 2026 The qkmeans Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

namespace qkm {

/// Minimal SVG document builder. Coordinates are user units with the origin at the top left.
class SvgDocument {
   public:
    SvgDocument(double width, double height);

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none");
    void circle(double cx, double cy, double r, std::string_view fill);
    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0);
    /// `anchor` is one of "start", "middle", "end".
    void text(double x, double y, std::string_view content, double size = 12.0, std::string_view anchor = "start",
              std::string_view fill = "#222");

    std::string str() const;

   private:
    double width_;
    double height_;
    std::string body_;
};

std::string xml_escape(std::string_view s);

/// Fixed qualitative palette; wraps around after its length.
std::string palette_color(size_t index);

/// White-to-blue ramp for t in [0, 1].
std::string heat_color(double t);

}  // namespace qkm
