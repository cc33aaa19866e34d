"""Standard GAN with a sigmoid discriminator and the non-saturating generator loss."""

from advreg.algorithms.adversarial import common


class SGAN(common.AdversarialRegressionTrainer):
    """Conditional standard GAN.

    The discriminator minimizes the binary cross-entropy of classifying real
    rows as 1 and generated rows as 0; the generator minimizes
    ``-mean ln D(c, G(c, z))``.
    """

    kind = "sgan"
