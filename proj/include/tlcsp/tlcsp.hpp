#pragma once

#include "tlcsp/error.hpp"
#include "tlcsp/eeg_data.hpp"
#include "tlcsp/eegx_io.hpp"
#include "tlcsp/synthetic.hpp"
#include "tlcsp/csp.hpp"
#include "tlcsp/lda.hpp"
#include "tlcsp/pipeline.hpp"
#include "tlcsp/tl_covariance.hpp"
#include "tlcsp/tl_model.hpp"
#include "tlcsp/tl_instance.hpp"
#include "tlcsp/bench.hpp"
