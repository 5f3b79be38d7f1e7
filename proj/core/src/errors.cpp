#include "taeblp/errors.hpp"

#include <sstream>

namespace taeblp {

namespace {

std::string band_message(int site, int value, double time, int layer) {
  std::ostringstream os;
  os << "increment left the admissible band: site=" << site << " omega=" << value
     << " time=" << time << " layer=" << layer;
  return os.str();
}

}  // namespace

BandViolation::BandViolation(int site, int value, double time, int layer)
    : std::runtime_error(band_message(site, value, time, layer)),
      site_(site),
      value_(value),
      time_(time),
      layer_(layer) {}

}  // namespace taeblp
