#pragma once

#include "mll/arff.hpp"
#include "mll/config.hpp"
#include "mll/csv.hpp"
#include "mll/dataset.hpp"
#include "mll/eval.hpp"
#include "mll/learners.hpp"
#include "mll/metrics.hpp"
#include "mll/multilabel.hpp"
#include "mll/persistence.hpp"
#include "mll/preprocess.hpp"
#include "mll/report.hpp"
#include "mll/sampling.hpp"
