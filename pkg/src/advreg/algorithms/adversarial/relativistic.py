"""Relativistic GANs, whose losses compare real and generated critic scores."""

from advreg.algorithms.adversarial import common


class RSGAN(common.AdversarialRegressionTrainer):
    """Relativistic standard GAN.

    Real and generated rows are paired by position; both losses are built
    on ``sigmoid(C(real) - C(fake))``.
    """

    kind = "rsgan"
    needs_real_for_gen = True


class RaSGAN(common.AdversarialRegressionTrainer):
    """Relativistic average GAN: each score is compared with the opposing batch mean."""

    kind = "rasgan"
    needs_real_for_gen = True
