#pragma once

// JSON encodings of the library's value types.
//
// Doubles that are not finite are written as the strings "inf", "-inf" and
// "nan". Vectors are arrays, matrices arrays of rows. Decoding failures of
// any kind surface as SchemaError.

#include <Eigen/Dense>
#include <string>

#include "json.hpp"

#include "barronlab/barron.hpp"
#include "barronlab/compose.hpp"
#include "barronlab/errors.hpp"
#include "barronlab/netfit.hpp"
#include "barronlab/separation.hpp"
#include "barronlab/spectral.hpp"
#include "barronlab/transport.hpp"

namespace barronlab {

using Json = nlohmann::json;

Json encode_double(double x);
double decode_double(const Json& j);

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);
/// Rows of the matrix. An empty array decodes to `rows_if_empty` x 0.
Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index rows_if_empty = 0);

std::string to_string(SetKind k);
SetKind set_kind_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);

void to_json(Json& j, const BarronEstimate& e);
void from_json(const Json& j, BarronEstimate& e);
void to_json(Json& j, const GammaPair& g);
void from_json(const Json& j, GammaPair& g);

void to_json(Json& j, const TwoLayerNet& net);
void from_json(const Json& j, TwoLayerNet& net);
void to_json(Json& j, const FitReport& r);
void from_json(const Json& j, FitReport& r);
void to_json(Json& j, const FitOptions& o);
void from_json(const Json& j, FitOptions& o);

/// {"dimension", "weights", "points": one coordinate array per point}.
void to_json(Json& j, const EmpiricalMeasure& mu);
void from_json(const Json& j, EmpiricalMeasure& mu);

void to_json(Json& j, const DenseLayer& d);
void from_json(const Json& j, DenseLayer& d);
/// Stores the blocks and the shift; decoding re-collapses.
void to_json(Json& j, const LayeredNet& net);
void from_json(const Json& j, LayeredNet& net);
void to_json(Json& j, const ErrorLedger& l);
void from_json(const Json& j, ErrorLedger& l);
/// The sampler is not stored; decoding installs the uniform sampler on the
/// base ball.
void to_json(Json& j, const ComposePlan& p);
void from_json(const Json& j, ComposePlan& p);
void to_json(Json& j, const MeasuredError& m);
void from_json(const Json& j, MeasuredError& m);
void to_json(Json& j, const WassersteinCertificate& w);
void from_json(const Json& j, WassersteinCertificate& w);

void to_json(Json& j, const SeparationConfig& c);
void from_json(const Json& j, SeparationConfig& c);
void to_json(Json& j, const SeparationRow& r);
void from_json(const Json& j, SeparationRow& r);
void to_json(Json& j, const SeparationReport& r);
void from_json(const Json& j, SeparationReport& r);

/// j.get<T>() with every decoding failure turned into SchemaError naming
/// `what`.
template <class T>
T decode(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(what + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw SchemaError(what + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(what + ": " + e.what());
  }
}

}  // namespace barronlab

// Types without a default constructor.
namespace nlohmann {

template <>
struct adl_serializer<barronlab::BoundedSetd> {
  static void to_json(json& j, const barronlab::BoundedSetd& b);
  static barronlab::BoundedSetd from_json(const json& j);
};

/// Header (dimension, center, half_width, resolution) plus the samples in
/// row-major order.
template <>
struct adl_serializer<barronlab::GridFunctiond> {
  static void to_json(json& j, const barronlab::GridFunctiond& f);
  static barronlab::GridFunctiond from_json(const json& j);
};

/// Header (dimension, cutoff, cell_volume, tail_estimate and either the
/// tensor axis or the explicit nodes) plus [re, im] amplitudes.
template <>
struct adl_serializer<barronlab::SpectrumGridd> {
  static void to_json(json& j, const barronlab::SpectrumGridd& s);
  static barronlab::SpectrumGridd from_json(const json& j);
};

}  // namespace nlohmann
