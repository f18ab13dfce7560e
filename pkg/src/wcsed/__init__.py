"""Speech endpoint detection by multi-scale wavelet convolution and frame entropy."""
from .signal_io import (SignalBuffer, UnsupportedCodecError, WavFormatError, load_wav,
                        rms_loudness, save_wav, to_mono)
from .wavelet import (MotherWavelet, ScaleBank, WaveletKernel, default_scale_bank,
                      kernel_at_scale, mother_wavelet, sample_mother_wavelet, scale_to_frequency)
from .convolution import convolve_direct, convolve_fft, convolve_same, first_difference
from .framing import (EntropyVector, FrameSpec, entropy_vector, frame_entropy, frame_indices,
                      histogram_probabilities)
from .detect import (CoefficientMatrix, Detection, DetectionError, DetectorConfig, EndpointResult,
                     NoContrastError, NoSpeechError, ThresholdPair, analyze, combine_coefficients,
                     compute_thresholds, detect_core_region, detect_endpoints, extract_segment,
                     include_edges, wave_conv)
from .evaluation import DeviationReport, GroundTruthLabel, aggregate_report, frame_deviation
from .synth import Burst, ItemSpec, random_corpus, synthesize_test_signal

__version__ = "0.1.0"
