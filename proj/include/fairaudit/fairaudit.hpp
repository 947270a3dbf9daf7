#pragma once

#include "fairaudit/audit.hpp"
#include "fairaudit/classifiers.hpp"
#include "fairaudit/data_model.hpp"
#include "fairaudit/errors.hpp"
#include "fairaudit/ingest.hpp"
#include "fairaudit/manifest.hpp"
#include "fairaudit/model_io.hpp"
#include "fairaudit/report_io.hpp"
#include "fairaudit/scoring.hpp"
#include "fairaudit/synthesis.hpp"
