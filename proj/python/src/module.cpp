/*
 * Copyright 2026 The pseudobox Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pseudobox/box_fitting.hpp"
#include "pseudobox/config.hpp"
#include "pseudobox/dbscan.hpp"
#include "pseudobox/dcpg.hpp"
#include "pseudobox/errors.hpp"
#include "pseudobox/eval.hpp"
#include "pseudobox/kitti_io.hpp"
#include "pseudobox/mask.hpp"
#include "pseudobox/pipeline.hpp"
#include "pseudobox/scoring.hpp"
#include "pseudobox/seeds.hpp"
#include "pseudobox/synth.hpp"

namespace py = pybind11;
using namespace pseudobox;

namespace
{

using PointArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point3> to_points(const PointArray & a)
{
  if (a.ndim() != 2 || a.shape(1) < 3) {
    throw py::value_error("expected an (N, 3) or (N, 4) array");
  }
  const auto r = a.unchecked<2>();
  std::vector<Point3> out(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    out[static_cast<std::size_t>(i)] = Point3(r(i, 0), r(i, 1), r(i, 2));
  }
  return out;
}

PointCloud to_cloud(const PointArray & a)
{
  PointCloud cloud;
  cloud.points = to_points(a);
  if (a.shape(1) >= 4) {
    const auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i) {
      cloud.intensity.push_back(static_cast<float>(r(i, 3)));
    }
  }
  cloud.validate();
  return cloud;
}

py::array_t<double> from_cloud(const PointCloud & cloud)
{
  py::array_t<double> out({static_cast<py::ssize_t>(cloud.size()), py::ssize_t{4}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto k = static_cast<py::ssize_t>(i);
    w(k, 0) = cloud.points[i].x();
    w(k, 1) = cloud.points[i].y();
    w(k, 2) = cloud.points[i].z();
    w(k, 3) = i < cloud.intensity.size() ? cloud.intensity[i] : 0.0;
  }
  return out;
}

py::array_t<std::uint8_t> pixel_array(const std::vector<std::uint8_t> & px, int h, int w)
{
  py::array_t<std::uint8_t> out({h, w});
  std::copy(px.begin(), px.end(), out.mutable_data());
  return out;
}

InstanceMask mask_from_array(int id, std::string cls,
                             const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> & a)
{
  if (a.ndim() != 2) {
    throw py::value_error("mask must be a 2-D array");
  }
  std::vector<std::uint8_t> px(a.data(), a.data() + a.size());
  for (auto & p : px) {
    p = p != 0 ? 1 : 0;
  }
  return InstanceMask(id, std::move(cls), static_cast<int>(a.shape(0)),
                      static_cast<int>(a.shape(1)), std::move(px));
}

std::vector<LabeledBox> to_labeled(const std::vector<ScoredProposal> & kept)
{
  std::vector<LabeledBox> out;
  for (const auto & k : kept) {
    out.push_back({k.proposal.class_name, k.proposal.box, k.ds});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Pseudo-label generation for LiDAR 3D detection from 2D instance masks.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_RuntimeError);
  py::register_exception<MalformedFileError>(m, "MalformedFileError", PyExc_RuntimeError);
  py::register_exception<DegenerateClusterError>(m, "DegenerateClusterError", PyExc_RuntimeError);
  py::register_exception<EmptyForegroundError>(m, "EmptyForegroundError", PyExc_RuntimeError);
  py::register_exception<SceneTooDenseError>(m, "SceneTooDenseError", PyExc_RuntimeError);

  py::class_<OrientedBox3D>(m, "Box")
    .def(py::init<const Point3 &, double, double, double, double>(), py::arg("center"),
         py::arg("length"), py::arg("width"), py::arg("height"), py::arg("yaw"))
    .def_property_readonly("center", &OrientedBox3D::center)
    .def_property_readonly("length", &OrientedBox3D::length)
    .def_property_readonly("width", &OrientedBox3D::width)
    .def_property_readonly("height", &OrientedBox3D::height)
    .def_property_readonly("yaw", &OrientedBox3D::yaw)
    .def_property_readonly("volume", &OrientedBox3D::volume)
    .def("corners",
         [](const OrientedBox3D & b) {
           const auto c = box_corners(b);
           py::array_t<double> out({8, 3});
           auto w = out.mutable_unchecked<2>();
           for (int i = 0; i < 8; ++i) {
             for (int k = 0; k < 3; ++k) {
               w(i, k) = c[i][k];
             }
           }
           return out;
         })
    .def("contains", [](const OrientedBox3D & b, const Point3 & p) { return point_in_box(p, b); })
    .def("__eq__", &OrientedBox3D::operator==)
    .def("__repr__", [](const OrientedBox3D & b) {
      return "Box(center=(" + std::to_string(b.center().x()) + ", " +
             std::to_string(b.center().y()) + ", " + std::to_string(b.center().z()) +
             "), l=" + std::to_string(b.length()) + ", w=" + std::to_string(b.width()) +
             ", h=" + std::to_string(b.height()) + ", yaw=" + std::to_string(b.yaw()) + ")";
    });

  py::class_<CalibrationSet>(m, "Calibration")
    .def(py::init<>())
    .def_readwrite("P2", &CalibrationSet::projection)
    .def_readwrite("R0_rect", &CalibrationSet::rectification)
    .def_readwrite("Tr_velo_to_cam", &CalibrationSet::lidar_to_camera)
    .def_readwrite("image_height", &CalibrationSet::image_height)
    .def_readwrite("image_width", &CalibrationSet::image_width)
    .def("lidar_to_rect", &CalibrationSet::lidar_to_rect)
    .def("rect_to_lidar", &CalibrationSet::rect_to_lidar)
    .def("project",
         [](const CalibrationSet & c, const PointArray & pts) {
           const auto proj = project_points(to_cloud(pts), c);
           py::array_t<double> uv({static_cast<py::ssize_t>(proj.size()), py::ssize_t{3}});
           py::array_t<bool> valid(static_cast<py::ssize_t>(proj.size()));
           auto w = uv.mutable_unchecked<2>();
           auto v = valid.mutable_unchecked<1>();
           for (std::size_t i = 0; i < proj.size(); ++i) {
             const auto k = static_cast<py::ssize_t>(i);
             w(k, 0) = proj[i].u;
             w(k, 1) = proj[i].v;
             w(k, 2) = proj[i].depth;
             v(k) = proj[i].valid;
           }
           return py::make_tuple(uv, valid);
         },
         "Returns (uv_depth (N, 3), valid (N,)).")
    .def_static("default_camera", &SynthConfig::default_camera);

  py::class_<InstanceMask>(m, "InstanceMask")
    .def(py::init(&mask_from_array), py::arg("id"), py::arg("class_name"), py::arg("pixels"))
    .def_property_readonly("id", &InstanceMask::id)
    .def_property_readonly("class_name", &InstanceMask::class_name)
    .def_property_readonly("pixels", [](const InstanceMask & mk) {
      return pixel_array(mk.pixels(), mk.height(), mk.width());
    })
    .def_property_readonly("bounds", [](const InstanceMask & mk) {
      const auto & b = mk.bounds();
      return py::make_tuple(b.u_min, b.u_max, b.v_min, b.v_max);
    });

  m.def(
    "shrink_mask",
    [](const InstanceMask & mk, double gamma) {
      const ShrunkMask s = shrink_mask(mk, gamma);
      return py::make_tuple(pixel_array(s.pixels, s.height, s.width),
                            py::make_tuple(s.u_lo, s.u_hi, s.v_lo, s.v_hi));
    },
    py::arg("mask"), py::arg("gamma"),
    "Returns (pixels, (u_lo, u_hi, v_lo, v_hi)) for the retained central region.");
  m.def(
    "encode_rle",
    [](const InstanceMask & mk) { return encode_rle(mk.pixels(), mk.height(), mk.width()); },
    py::arg("mask"));

  m.def(
    "extract_seed_points",
    [](const PointArray & pts, const std::vector<InstanceMask> & masks, const CalibrationSet & c,
       double gamma) {
      py::dict out;
      for (const auto & s : extract_seed_points(to_cloud(pts), masks, c, gamma)) {
        out[py::int_(s.instance_id)] = s.indices;
      }
      return out;
    },
    py::arg("points"), py::arg("masks"), py::arg("calib"), py::arg("gamma") = 0.3,
    "Maps instance id to the indices of its seed points.");

  m.def("radius_schedule", &radius_schedule, py::arg("t"), py::arg("n"), py::arg("r_init") = 1.0,
        py::arg("delta") = 0.1);
  m.def(
    "dbscan",
    [](const PointArray & pts, double eps, std::size_t min_pts) {
      return dbscan(to_points(pts), eps, min_pts);
    },
    py::arg("points"), py::arg("eps"), py::arg("min_pts"), "Cluster labels, -1 for noise.");
  m.def(
    "fit_box",
    [](const PointArray & pts, double yaw_step_deg) {
      FitParams p;
      p.yaw_step_deg = yaw_step_deg;
      return fit_box(to_points(pts), p);
    },
    py::arg("points"), py::arg("yaw_step_deg") = 1.0);

  m.def("boundary_distance", &boundary_distance, py::arg("point"), py::arg("box"),
        py::arg("use_height") = false);
  m.def(
    "distribution_score",
    [](const OrientedBox3D & box, const PointArray & pts) {
      return distribution_score(box, to_cloud(pts));
    },
    py::arg("box"), py::arg("points"));
  m.def(
    "meta_shape_score",
    [](const OrientedBox3D & box, double l, double w, double h) {
      return meta_shape_score(box, MetaShape::from_extents("", l, w, h));
    },
    py::arg("box"), py::arg("length"), py::arg("width"), py::arg("height"));
  m.def("ds_score", &ds_score, py::arg("distribution_norm"), py::arg("meta_shape_norm"),
        py::arg("lambda1") = 0.5, py::arg("lambda2") = 0.5);
  m.def("bev_iou", &bev_iou);
  m.def("iou3d", &iou3d);
  m.def(
    "nms",
    [](const std::vector<OrientedBox3D> & boxes, const std::vector<double> & scores,
       double threshold) {
      if (boxes.size() != scores.size()) {
        throw py::value_error("boxes and scores differ in length");
      }
      std::vector<ScoredProposal> props;
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        ScoredProposal s{Proposal{boxes[i], static_cast<int>(i), "", 0.0, 0, {}}};
        s.ds = scores[i];
        props.push_back(std::move(s));
      }
      std::vector<int> kept;
      for (const auto & k : nms(std::move(props), threshold)) {
        kept.push_back(k.proposal.instance_id);
      }
      return kept;
    },
    py::arg("boxes"), py::arg("scores"), py::arg("threshold") = 0.1,
    "Indices of the kept boxes, best first.");
  m.def(
    "bucket_percentages",
    [](std::size_t low, std::size_t mid, std::size_t high) {
      const auto p = bucket_percentages({low, mid, high});
      return py::make_tuple(round_percent(p[0]), round_percent(p[1]), round_percent(p[2]));
    },
    py::arg("low"), py::arg("mid"), py::arg("high"));

  py::class_<PipelineConfig>(m, "PipelineConfig")
    .def(py::init<>())
    .def_static("load", &load_pipeline_config)
    .def("set",
         [](PipelineConfig & c, const std::string & key, const py::object & value) {
           apply_setting(c, key, py::str(value));
           return &c;
         },
         py::return_value_policy::reference_internal)
    .def_readwrite("dataset_root", &PipelineConfig::dataset_root)
    .def_readwrite("output_dir", &PipelineConfig::output_dir)
    .def_readwrite("gamma", &PipelineConfig::shrink)
    .def_readwrite("workers", &PipelineConfig::workers)
    .def("canonical", &PipelineConfig::canonical)
    .def("hash", &PipelineConfig::hash);

  py::class_<SynthConfig>(m, "SynthConfig")
    .def(py::init<>())
    .def_static("load", &load_synth_config)
    .def("set",
         [](SynthConfig & c, const std::string & key, const py::object & value) {
           apply_setting(c, key, py::str(value));
           return &c;
         },
         py::return_value_policy::reference_internal)
    .def_readwrite("seed", &SynthConfig::seed);

  m.def(
    "sample_scene",
    [](const SynthConfig & config, std::size_t frame) {
      const SynthScene s = sample_scene(config, frame);
      py::dict out;
      out["frame_id"] = s.bundle.frame_id;
      out["points"] = from_cloud(s.bundle.cloud);
      out["point_labels"] = s.point_labels;
      out["calib"] = s.bundle.calib;
      out["masks"] = s.bundle.masks;
      py::list gt;
      for (const auto & g : *s.bundle.ground_truth) {
        gt.append(py::make_tuple(g.class_name, g.box));
      }
      out["ground_truth"] = gt;
      return out;
    },
    py::arg("config"), py::arg("frame"));

  m.def(
    "process_frame",
    [](const PointArray & pts, const std::vector<InstanceMask> & masks, const CalibrationSet & c,
       const PipelineConfig & config) {
      FrameBundle bundle;
      bundle.cloud = to_cloud(pts);
      bundle.calib = c;
      bundle.masks = masks;
      const FrameResult r = process_frame(bundle, config);
      if (!r.ok) {
        throw InputError(r.error);
      }
      py::list out;
      for (const auto & l : to_labeled(r.kept)) {
        out.append(py::make_tuple(l.class_name, l.box, l.score));
      }
      return out;
    },
    py::arg("points"), py::arg("masks"), py::arg("calib"), py::arg("config") = PipelineConfig{},
    "Kept pseudo-labels as (class, box, ds) tuples, best first.");

  m.def(
    "generate",
    [](const PipelineConfig & config) {
      py::gil_scoped_release release;
      const RunSummary s = cmd_generate(config);
      return s.failed;
    },
    py::arg("config"), "Runs the pipeline over a dataset; returns the failed frame count.");
  m.def(
    "evaluate",
    [](const PipelineConfig & config, const std::filesystem::path & labels,
       const std::filesystem::path & gt) { return format_report_json(cmd_eval(config, labels, gt)); },
    py::arg("config"), py::arg("labels"), py::arg("gt"), "Returns the report as JSON text.");
  m.def(
    "synthesize",
    [](const SynthConfig & config, const std::filesystem::path & root, std::size_t frames,
       std::size_t workers) {
      py::gil_scoped_release release;
      cmd_synth(config, root, frames, workers);
    },
    py::arg("config"), py::arg("root"), py::arg("frames"), py::arg("workers") = 1);
}
