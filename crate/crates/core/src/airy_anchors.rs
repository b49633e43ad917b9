// Generated reference values of Ai, Ai', Bi, Bi' on a 0.5-spaced grid over [-10, 10].
pub(crate) const ANCHOR_START: f64 = -10.0;
pub(crate) const ANCHOR_STEP: f64 = 0.5;
pub(crate) const ANCHORS: [[f64; 4]; 41] = [
    [0.04024123848644319, 0.99626504413279, -0.3146798296438386, 0.11941411339990923],
    [0.3191032477191282, -0.10809531881187123, 0.0377854324894665, 0.9847140700021197],
    [-0.022133721547341403, -0.9756639809263316, 0.3249473234552449, -0.05740051384366925],
    [-0.33029023763020887, -0.03231334828463914, 0.007754436447658404, -0.9629691651201748],
    [-0.0527050503563862, 0.9355609381983065, -0.33125158075113786, -0.1594504978129814],
    [0.3217757163806479, 0.3188095066985546, -0.1124634850764908, 0.8778022815457609],
    [0.18428083525050565, -0.7710081684101265, 0.293762071854414, 0.4982445900581135],
    [-0.2380203019971158, -0.6749524925132022, 0.26101265763648396, -0.597170666291622],
    [-0.3291451736298231, 0.3459354872813429, -0.14669837667055705, -0.812898785105067],
    [0.017781541276574976, 0.8641972177713984, -0.367813453915712, 0.025111583073630928],
    [0.35076100902411433, 0.32719281855444315, -0.13836913490160058, 0.7784117730018992],
    [0.2921527810559595, -0.5233625323157477, 0.2538726576969326, 0.6347447677736637],
    [-0.07026553294928951, -0.7906285753685813, 0.3922347057069993, -0.1166705674383409],
    [-0.37553382314043193, -0.34344343345404815, 0.16893983748105862, -0.6931162849072888],
    [-0.37881429367765806, 0.3145837692165988, -0.19828962637492653, -0.6756112226852585],
    [-0.11232506769296609, 0.6788527342647943, -0.4324224718407053, -0.2204201548746296],
    [0.22740742820168558, 0.618259020741691, -0.4123025879563985, 0.2787951669211695],
    [0.4642565777488694, 0.3091869672024104, -0.19178486115704121, 0.5579081030218973],
    [0.5355608832923521, -0.01016056711664521, 0.1039973894969446, 0.5923756264227924],
    [0.4757280916105396, -0.20408167033954738, 0.38035265975105387, 0.5059337136238472],
    [0.3550280538878172, -0.2588194037928068, 0.6149266274460007, 0.4482883573538264],
    [0.23169360648083348, -0.2249105326646839, 0.8542770431031554, 0.5445725641405923],
    [0.13529241631288141, -0.1591474412967932, 1.2074235949528713, 0.9324359333927756],
    [0.07174949700810541, -0.09738201284230132, 1.878941503747895, 1.8862122548481655],
    [0.03492413042327438, -0.05309038443365363, 3.2980949999782148, 4.10068204993289],
    [0.01572592338047049, -0.026250881035903232, 6.481660738460579, 9.421423317334302],
    [0.006591139357460719, -0.011912976705951319, 14.037328963730232, 22.92221496638217],
    [0.002584098786989635, -0.005004413967952583, 33.05550675461148, 59.164319581360985],
    [0.0009515638512048018, -0.001958640950204179, 83.84707140846814, 161.9266835046134],
    [0.00033025032351430896, -0.0007178665675575089, 227.58808183559972, 469.13507732796637],
    [0.00010834442813607442, -0.0002474138908684625, 657.7920441711711, 1435.8190802179824],
    [3.368531190859981e-05, -8.046339130556515e-05, 2016.5800386595313, 4632.553733139042],
    [9.947694360252889e-06, -2.4765200397034955e-05, 6536.446104809864, 15725.602621930477],
    [2.7958823432049136e-06, -7.231931466601793e-06, 22340.607718396997, 56062.49584252286],
    [7.492128863997167e-07, -2.008150894738792e-06, 80327.79070943025, 209552.6708739713],
    [1.9172560675134309e-07, -5.312713959720545e-07, 303229.6151125334, 819987.8353587997],
    [4.6922076160992316e-08, -1.3414392979067865e-07, 1199586.00412446, 3354342.3127445388],
    [1.0997009755195506e-08, -3.237725440447602e-08, 4965319.541471302, 14326301.030662058],
    [2.47116843087249e-09, -7.480641389658946e-09, 21472868.891435347, 63807489.78090821],
    [5.330263704617492e-10, -1.6566394593740667e-09, 96892265.58045109, 296034763.86800504],
    [1.1047532552898686e-10, -3.5206336767389237e-10, 455641153.54822516, 1429236134.4828658],
];
